#pragma once

#include "qmcltl/automata.hpp"
#include "qmcltl/checker.hpp"
#include "qmcltl/error.hpp"
#include "qmcltl/ltl.hpp"
#include "qmcltl/model_io.hpp"
#include "qmcltl/numerics.hpp"
#include "qmcltl/props.hpp"
#include "qmcltl/spectral.hpp"
#include "qmcltl/superop.hpp"
#include "qmcltl/tolerances.hpp"
