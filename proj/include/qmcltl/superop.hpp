#pragma once

// Density operators, Kraus-form channels and quantum Markov chains.

#include <optional>
#include <vector>

#include "qmcltl/numerics.hpp"
#include "qmcltl/tolerances.hpp"

namespace qmcltl {

/// Hermitian, positive semi-definite, unit-trace d x d matrix.
///
/// Construction accepts inputs within the strict tolerances as they are
/// (after exact Hermitization), re-projects inputs whose violation is below
/// `Tolerances::drift`, and rejects anything worse.
class DensityOperator {
 public:
  /// Throws InputError when the matrix is not a density operator.
  explicit DensityOperator(const CMatrix& mat, const Tolerances& tol = {});

  /// As the constructor, but for computed matrices: throws NumericalDrift.
  static DensityOperator fromComputed(const CMatrix& mat, const Tolerances& tol = {});

  static DensityOperator pure(const CVector& psi);
  static DensityOperator maximallyMixed(Index d);
  static DensityOperator basis(Index d, Index i);

  const CMatrix& mat() const noexcept { return mat_; }
  Index dim() const noexcept { return mat_.rows(); }

 private:
  struct Trusted {};
  DensityOperator(Trusted, CMatrix mat) : mat_(std::move(mat)) {}
  static DensityOperator check(const CMatrix& mat, const Tolerances& tol, bool computed);

  CMatrix mat_;
};

/// Kraus operators of one map, all d x d.
///
/// A raw set skips the completeness check; it houses MPS tensors that are
/// only used through their transfer matrix.
class KrausSet {
 public:
  explicit KrausSet(std::vector<CMatrix> operators);
  static KrausSet raw(std::vector<CMatrix> operators);

  Index dim() const noexcept { return dim_; }
  const std::vector<CMatrix>& operators() const noexcept { return ops_; }
  bool isRaw() const noexcept { return raw_; }

 private:
  KrausSet(std::vector<CMatrix> operators, bool raw);
  std::vector<CMatrix> ops_;
  Index dim_ = 0;
  bool raw_ = false;
};

struct CptpReport {
  double deviation = 0.0;  ///< |sum E_k^dagger E_k - I|_F
  bool pass = false;
};

CptpReport validateCptp(const KrausSet& k, const Tolerances& tol = {});

/// sum_k E_k (x) conj(E_k).
CMatrix matrixRepresentation(const KrausSet& k);

/// A channel with its cached d^2 x d^2 matrix representation.
class SuperOperator {
 public:
  /// Throws InputError unless the set is raw or passes validateCptp.
  explicit SuperOperator(KrausSet kraus, const Tolerances& tol = {});
  SuperOperator(KrausSet kraus, CMatrix rep);

  const KrausSet& kraus() const noexcept { return kraus_; }
  const CMatrix& rep() const noexcept { return rep_; }
  Index dim() const noexcept { return kraus_.dim(); }

 private:
  KrausSet kraus_;
  CMatrix rep_;
};

SuperOperator identityChannel(Index d);
SuperOperator unitaryChannel(const CMatrix& u, const Tolerances& tol = {});

/// sum_k E_k rho E_k^dagger; throws NumericalDrift if the result is no
/// longer a density operator.
DensityOperator apply(const SuperOperator& e, const DensityOperator& rho, const Tolerances& tol = {});
/// Unchecked Kraus sum for arbitrary operators.
CMatrix applyToOperator(const SuperOperator& e, const CMatrix& a);

/// e2 after e1. Kraus operators are all products E2_i E1_j.
SuperOperator compose(const SuperOperator& e2, const SuperOperator& e1);

/// (H, E, rho0); the initial state is absent for the pair form (H, E).
struct QMC {
  QMC(SuperOperator e, std::optional<DensityOperator> rho0 = std::nullopt);

  SuperOperator superop;
  std::optional<DensityOperator> initial;

  Index dim() const noexcept { return superop.dim(); }
};

/// (H (x) H, E (x) id, |Omega><Omega| / d). The initial state of `g`, if
/// any, is ignored.
QMC choiLift(const QMC& g);

/// Kraus operators sqrt(P(s,t)) |t><s| and initial sum_s mu0(s) |s><s|.
QMC embedClassicalMc(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu0, const Tolerances& tol = {});

/// tr(M^N) for the transfer matrix of the (possibly raw) tensors.
double mpsInnerProduct(const KrausSet& k, unsigned n, const Tolerances& tol = {});

}  // namespace qmcltl
