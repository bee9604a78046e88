#include "qmcltl/superop.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

[[noreturn]] void fail(bool computed, const std::string& what) {
  if (computed) throw NumericalDrift(what);
  throw InputError(what);
}

}  // namespace

DensityOperator DensityOperator::check(const CMatrix& mat, const Tolerances& tol, bool computed) {
  if (mat.rows() != mat.cols() || mat.rows() == 0) fail(computed, "density operator must be a non-empty square matrix");
  if (!mat.allFinite()) fail(computed, "density operator has non-finite entries");
  const double herm = hermiticityDefect(mat);
  CMatrix h = (mat + mat.adjoint()) / 2.0;
  const double tr = h.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double minEig = es.eigenvalues().minCoeff();
  const double trDev = std::abs(tr - 1.0);
  if (herm <= tol.herm && trDev <= tol.trace && minEig >= -tol.psd) return {Trusted{}, std::move(h)};

  const double worst = std::max({herm, trDev, -minEig});
  if (worst > tol.drift) {
    std::ostringstream msg;
    msg << "not a density operator (hermiticity " << herm << ", trace " << tr << ", min eigenvalue " << minEig << ")";
    fail(computed, msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> full(h);
  Eigen::VectorXd w = full.eigenvalues().cwiseMax(0.0);
  const double sum = w.sum();
  if (sum <= 0.0) fail(computed, "density operator re-projection lost all weight");
  w /= sum;
  CMatrix projected = full.eigenvectors() * w.cast<Complex>().asDiagonal() * full.eigenvectors().adjoint();
  projected = (projected + projected.adjoint()) / 2.0;
  return {Trusted{}, std::move(projected)};
}

DensityOperator::DensityOperator(const CMatrix& mat, const Tolerances& tol) : DensityOperator(check(mat, tol, false)) {}

DensityOperator DensityOperator::fromComputed(const CMatrix& mat, const Tolerances& tol) { return check(mat, tol, true); }

DensityOperator DensityOperator::pure(const CVector& psi) {
  const double n = psi.norm();
  if (n == 0.0 || !psi.allFinite()) throw InputError("pure state needs a non-zero finite vector");
  const CVector v = psi / n;
  return DensityOperator(CMatrix(v * v.adjoint()));
}

DensityOperator DensityOperator::maximallyMixed(Index d) {
  return DensityOperator(CMatrix(CMatrix::Identity(d, d) / double(d)));
}

DensityOperator DensityOperator::basis(Index d, Index i) {
  if (i < 0 || i >= d) throw InputError("basis index out of range");
  CMatrix m = CMatrix::Zero(d, d);
  m(i, i) = 1.0;
  return DensityOperator(m);
}

KrausSet::KrausSet(std::vector<CMatrix> operators, bool raw) : ops_(std::move(operators)), raw_(raw) {
  if (ops_.empty()) throw InputError("Kraus set needs at least one operator");
  dim_ = ops_.front().rows();
  if (dim_ == 0) throw InputError("Kraus operators must be non-empty");
  for (const auto& e : ops_) {
    if (e.rows() != dim_ || e.cols() != dim_) throw InputError("Kraus operators must all be square of one dimension");
    if (!e.allFinite()) throw InputError("Kraus operator has non-finite entries");
  }
}

KrausSet::KrausSet(std::vector<CMatrix> operators) : KrausSet(std::move(operators), false) {}

KrausSet KrausSet::raw(std::vector<CMatrix> operators) { return KrausSet(std::move(operators), true); }

CptpReport validateCptp(const KrausSet& k, const Tolerances& tol) {
  const Index d = k.dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& e : k.operators()) sum += e.adjoint() * e;
  CptpReport r;
  r.deviation = (sum - CMatrix::Identity(d, d)).norm();
  r.pass = r.deviation <= tol.cptp;
  return r;
}

CMatrix matrixRepresentation(const KrausSet& k) {
  const Index d = k.dim();
  CMatrix m = CMatrix::Zero(d * d, d * d);
  for (const auto& e : k.operators()) m += kron(e, e.conjugate());
  return m;
}

SuperOperator::SuperOperator(KrausSet kraus, const Tolerances& tol) : kraus_(std::move(kraus)) {
  if (!kraus_.isRaw()) {
    const auto r = validateCptp(kraus_, tol);
    if (!r.pass) {
      std::ostringstream msg;
      msg << "Kraus operators are not trace preserving (deviation " << r.deviation << ")";
      throw InputError(msg.str());
    }
  }
  rep_ = matrixRepresentation(kraus_);
}

SuperOperator::SuperOperator(KrausSet kraus, CMatrix rep) : kraus_(std::move(kraus)), rep_(std::move(rep)) {}

SuperOperator identityChannel(Index d) { return SuperOperator(KrausSet({CMatrix::Identity(d, d)})); }

SuperOperator unitaryChannel(const CMatrix& u, const Tolerances& tol) { return SuperOperator(KrausSet({u}), tol); }

CMatrix applyToOperator(const SuperOperator& e, const CMatrix& a) {
  if (a.rows() != e.dim() || a.cols() != e.dim()) throw InputError("operator dimension does not match the channel");
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  for (const auto& k : e.kraus().operators()) out += k * a * k.adjoint();
  return out;
}

DensityOperator apply(const SuperOperator& e, const DensityOperator& rho, const Tolerances& tol) {
  return DensityOperator::fromComputed(applyToOperator(e, rho.mat()), tol);
}

SuperOperator compose(const SuperOperator& e2, const SuperOperator& e1) {
  if (e2.dim() != e1.dim()) throw InputError("compose: dimension mismatch");
  std::vector<CMatrix> ops;
  for (const auto& a : e2.kraus().operators())
    for (const auto& b : e1.kraus().operators()) ops.push_back(a * b);
  KrausSet k = (e1.kraus().isRaw() || e2.kraus().isRaw()) ? KrausSet::raw(std::move(ops)) : KrausSet(std::move(ops));
  return SuperOperator(std::move(k), CMatrix(e2.rep() * e1.rep()));
}

QMC::QMC(SuperOperator e, std::optional<DensityOperator> rho0) : superop(std::move(e)), initial(std::move(rho0)) {
  if (initial && initial->dim() != superop.dim()) throw InputError("initial state dimension does not match the channel");
}

QMC choiLift(const QMC& g) {
  const Index d = g.dim();
  const CMatrix id = CMatrix::Identity(d, d);
  std::vector<CMatrix> ops;
  for (const auto& e : g.superop.kraus().operators()) ops.push_back(kron(e, id));
  KrausSet k = g.superop.kraus().isRaw() ? KrausSet::raw(std::move(ops)) : KrausSet(std::move(ops));
  SuperOperator lifted(std::move(k));
  const CVector omega = omegaVector(d);
  DensityOperator rho0(CMatrix(omega * omega.adjoint() / double(d)));
  return QMC(std::move(lifted), std::move(rho0));
}

QMC embedClassicalMc(const Eigen::MatrixXd& p, const Eigen::VectorXd& mu0, const Tolerances& tol) {
  const Index n = p.rows();
  if (n == 0 || p.cols() != n) throw InputError("transition matrix must be square and non-empty");
  if (mu0.size() != n) throw InputError("initial distribution has the wrong length");
  for (Index s = 0; s < n; ++s) {
    if ((p.row(s).array() < -tol.trace).any()) throw InputError("transition matrix has negative entries");
    if (std::abs(p.row(s).sum() - 1.0) > 1e-10) throw InputError("transition matrix is not row-stochastic");
  }
  if ((mu0.array() < -tol.trace).any() || std::abs(mu0.sum() - 1.0) > 1e-10)
    throw InputError("initial distribution is not a probability vector");
  std::vector<CMatrix> ops;
  for (Index s = 0; s < n; ++s)
    for (Index t = 0; t < n; ++t) {
      if (p(s, t) <= 0.0) continue;
      CMatrix e = CMatrix::Zero(n, n);
      e(t, s) = std::sqrt(p(s, t));
      ops.push_back(std::move(e));
    }
  SuperOperator e(KrausSet(std::move(ops)), tol);
  CMatrix rho = CMatrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) rho(s, s) = std::max(mu0(s), 0.0);
  return QMC(std::move(e), DensityOperator(rho, tol));
}

double mpsInnerProduct(const KrausSet& k, unsigned n, const Tolerances& tol) {
  if (n == 0) throw InputError("MPS length must be at least 1");
  const Complex t = matrixPower(matrixRepresentation(k), n).trace();
  if (std::abs(t.imag()) > tol.imag * std::max(1.0, std::abs(t.real())))
    throw NumericalDrift("transfer-matrix trace has a non-negligible imaginary part");
  return t.real();
}

}  // namespace qmcltl
