#pragma once

// JSON model files, tolerance files and machine-readable reports.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcltl/checker.hpp"
#include "qmcltl/ltl.hpp"
#include "qmcltl/props.hpp"
#include "qmcltl/superop.hpp"
#include "qmcltl/tolerances.hpp"

namespace qmcltl {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

enum class Semantics { State, Superoperator };
enum class PropKind { Observable, Trace };

struct ModelProp {
  std::string name;
  PropKind kind = PropKind::Observable;
  std::optional<CMatrix> observable;
  Window window;
};

struct Model {
  int schemaVersion = kSchemaVersion;
  Index dimension = 0;
  Semantics semantics = Semantics::State;
  std::vector<CMatrix> kraus;
  std::optional<CMatrix> initialState;
  std::vector<ModelProp> props;
  std::string formula;
  unsigned jOffset = 0;

  /// The formula text wrapped in X^jOffset.
  Formula effectiveFormula() const;
  /// (H, E, rho0), or (H, E) under super-operator semantics.
  QMC chain(const Tolerances& tol = {}) const;
  std::vector<std::string> propNames() const;
};

/// The chain and observable propositions that state-semantics checking
/// runs on: the model itself, or its Choi lift with lifted propositions.
struct Problem {
  QMC chain;
  std::vector<ObservableProp> props;
  Formula formula;
  Index originalDimension = 0;
};

Problem buildProblem(const Model& m, const Tolerances& tol = {});

/// Throws InputError on schema or consistency violations.
Model modelFromJson(const Json& j);
Json modelToJson(const Model& m);
Model loadModel(const std::string& path);

/// Overrides the fields named in the object; unknown names are errors.
Tolerances tolerancesFromJson(const Json& j, Tolerances base = {});
Json tolerancesToJson(const Tolerances& t);
Tolerances loadTolerances(const std::string& path, Tolerances base = {});

Json matrixToJson(const CMatrix& m);
CMatrix matrixFromJson(const Json& j);
Json windowToJson(const Window& w);
Window windowFromJson(const Json& j);

Json reportToJson(const CheckReport& r);
CheckReport reportFromJson(const Json& j);
Json refinementToJson(const RefinementResult& r);
RefinementResult refinementFromJson(const Json& j);

}  // namespace qmcltl
