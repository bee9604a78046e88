#include "qmcltl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qmcltl/error.hpp"

namespace qmcltl {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector vectorize(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("vectorize: matrix is not square");
  const Index d = a.rows();
  CVector v(d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) v(i * d + j) = a(i, j);
  return v;
}

CMatrix devectorize(const CVector& v) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw InputError("devectorize: length is not a perfect square");
  CMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = v(i * d + j);
  return a;
}

CVector omegaVector(Index d) { return vectorize(CMatrix::Identity(d, d)); }

double frobeniusNorm(const CMatrix& a) { return a.norm(); }

double euclideanNorm(const CVector& v) { return v.norm(); }

std::vector<double> singularValues(const CMatrix& a) {
  if (a.size() == 0) return {};
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double spectralNorm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return singularValues(a).front();
}

bool allFinite(const CMatrix& a) { return a.allFinite(); }

double hermiticityDefect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix matrixPower(const CMatrix& a, unsigned n) {
  CMatrix result = CMatrix::Identity(a.rows(), a.cols());
  CMatrix base = a;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

EigOptions eigOptions(const Tolerances& tol, double separateAbove) {
  EigOptions o;
  o.cluster = tol.cluster;
  o.defectCond = tol.defectCond;
  o.nilpotent = tol.nilpotent;
  o.separateAbove = separateAbove;
  return o;
}

namespace {

// Swap the adjacent diagonal entries k, k+1 of the upper-triangular t by a
// unitary similarity, accumulating the rotation into q.
void swapAdjacent(CMatrix& t, CMatrix& q, Index k) {
  const Index n = t.rows();
  const Complex f = t(k, k + 1);
  const Complex g = t(k + 1, k + 1) - t(k, k);
  const double nf = std::abs(f);
  const double ng = std::abs(g);
  const double r = std::hypot(nf, ng);
  if (r == 0.0) return;  // identical eigenvalues and no coupling: already in either order
  double c;
  Complex s;
  if (nf == 0.0) {
    c = 0.0;
    s = Complex(1.0, 0.0) * std::conj(g) / ng;
  } else {
    c = nf / r;
    s = (f / nf) * std::conj(g) / r;
  }
  // G = [[c, s], [-conj(s), c]], G * [f; g] = [*; 0]. T <- G T G^H, Q <- Q G^H.
  for (Index j = 0; j < n; ++j) {
    const Complex x = t(k, j);
    const Complex y = t(k + 1, j);
    t(k, j) = c * x + s * y;
    t(k + 1, j) = -std::conj(s) * x + c * y;
  }
  for (Index i = 0; i < n; ++i) {
    const Complex x = t(i, k);
    const Complex y = t(i, k + 1);
    t(i, k) = c * x + std::conj(s) * y;
    t(i, k + 1) = -s * x + c * y;
  }
  for (Index i = 0; i < n; ++i) {
    const Complex x = q(i, k);
    const Complex y = q(i, k + 1);
    q(i, k) = c * x + std::conj(s) * y;
    q(i, k + 1) = -s * x + c * y;
  }
  t(k + 1, k) = 0.0;
}

// Solve a x - x b = rhs for upper-triangular a (p x p) and b (q x q) with
// disjoint spectra.
CMatrix solveTriangularSylvester(const CMatrix& a, const CMatrix& b, const CMatrix& rhs) {
  const Index p = a.rows();
  const Index qn = b.rows();
  CMatrix x = CMatrix::Zero(p, qn);
  for (Index c = 0; c < qn; ++c) {
    for (Index r = p - 1; r >= 0; --r) {
      Complex acc = rhs(r, c);
      for (Index s = r + 1; s < p; ++s) acc -= a(r, s) * x(s, c);
      for (Index s = 0; s < c; ++s) acc += x(r, s) * b(s, c);
      Complex denom = a(r, r) - b(c, c);
      if (denom == Complex(0.0, 0.0)) denom = std::numeric_limits<double>::min();
      x(r, c) = acc / denom;
    }
  }
  return x;
}

struct Range {
  Index begin;
  Index size;
};

double conditionNumber(const CMatrix& y) {
  const auto s = singularValues(y);
  if (s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

}  // namespace

EigenSystem eig(const CMatrix& a, const EigOptions& options) {
  if (a.rows() != a.cols()) throw InputError("eig: matrix is not square");
  if (!a.allFinite()) throw InputError("eig: matrix has non-finite entries");
  const Index n = a.rows();
  EigenSystem out;
  out.inputNorm = spectralNorm(a);
  if (n == 0) return out;

  Eigen::ComplexSchur<CMatrix> schur(a);
  if (schur.info() != Eigen::Success) throw ConvergenceFailure("eig: Schur iteration did not converge");
  CMatrix t = schur.matrixT();
  CMatrix q = schur.matrixU();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < i; ++j) t(i, j) = 0.0;

  const double scale = std::max(out.inputNorm, std::numeric_limits<double>::min());
  const double clusterDist = options.cluster * scale;
  auto separated = [&](Complex x, Complex y) {
    if (options.separateAbove <= 0.0) return false;
    return (std::abs(x) >= options.separateAbove) != (std::abs(y) >= options.separateAbove);
  };

  // Single-linkage clustering of the diagonal of t.
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  auto relabel = [&](int from, int to) {
    for (auto& l : label)
      if (l == from) l = to;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const auto li = label[static_cast<std::size_t>(i)];
      const auto lj = label[static_cast<std::size_t>(j)];
      if (li != lj && std::abs(t(i, i) - t(j, j)) <= clusterDist && !separated(t(i, i), t(j, j)))
        relabel(lj, li);
    }

  CMatrix y;
  CMatrix yInv;
  std::vector<Range> ranges;
  for (;;) {
    // Rank clusters by decreasing modulus, then by angle, and sort the Schur
    // diagonal into contiguous cluster runs.
    std::vector<int> ids(label);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<double> modulus(ids.size(), 0.0);
    std::vector<Complex> mean(ids.size(), 0.0);
    std::vector<int> count(ids.size(), 0);
    auto slot = [&](int id) {
      return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (Index i = 0; i < n; ++i) {
      const auto s = slot(label[static_cast<std::size_t>(i)]);
      modulus[s] = std::max(modulus[s], std::abs(t(i, i)));
      mean[s] += t(i, i);
      ++count[s];
    }
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t z) {
      if (modulus[x] != modulus[z]) return modulus[x] > modulus[z];
      return std::arg(mean[x] / double(count[x])) < std::arg(mean[z] / double(count[z]));
    });
    std::vector<int> rankOf(ids.size());
    for (std::size_t r = 0; r < order.size(); ++r) rankOf[order[r]] = static_cast<int>(r);
    std::vector<int> rank(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) rank[static_cast<std::size_t>(i)] = rankOf[slot(label[static_cast<std::size_t>(i)])];

    for (bool swapped = true; swapped;) {
      swapped = false;
      for (Index k = 0; k + 1 < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (rank[uk] > rank[uk + 1]) {
          swapAdjacent(t, q, k);
          std::swap(rank[uk], rank[uk + 1]);
          std::swap(label[uk], label[uk + 1]);
          swapped = true;
        }
      }
    }

    ranges.clear();
    for (Index i = 0; i < n;) {
      Index j = i;
      while (j < n && rank[static_cast<std::size_t>(j)] == rank[static_cast<std::size_t>(i)]) ++j;
      ranges.push_back({i, j - i});
      i = j;
    }

    // Block-diagonalize: t * y = y * blockdiag(t), y unit upper triangular.
    y = CMatrix::Identity(n, n);
    const auto nb = ranges.size();
    for (std::size_t jb = 1; jb < nb; ++jb) {
      const auto& rj = ranges[jb];
      for (std::size_t ib = jb; ib-- > 0;) {
        const auto& ri = ranges[ib];
        CMatrix rhs = -t.block(ri.begin, rj.begin, ri.size, rj.size);
        for (std::size_t lb = ib + 1; lb < jb; ++lb) {
          const auto& rl = ranges[lb];
          rhs -= t.block(ri.begin, rl.begin, ri.size, rl.size) * y.block(rl.begin, rj.begin, rl.size, rj.size);
        }
        y.block(ri.begin, rj.begin, ri.size, rj.size) =
            solveTriangularSylvester(t.block(ri.begin, ri.begin, ri.size, ri.size),
                                     t.block(rj.begin, rj.begin, rj.size, rj.size), rhs);
      }
    }
    out.conditionEstimate = conditionNumber(y);
    if (!std::isfinite(out.conditionEstimate) || out.conditionEstimate > options.defectCond) {
      // Merge the closest pair of clusters that may share a cluster.
      double best = std::numeric_limits<double>::infinity();
      int from = -1;
      int to = -1;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
          const auto li = label[static_cast<std::size_t>(i)];
          const auto lj = label[static_cast<std::size_t>(j)];
          if (li == lj || separated(t(i, i), t(j, j))) continue;
          const double dist = std::abs(t(i, i) - t(j, j));
          if (dist < best) {
            best = dist;
            from = lj;
            to = li;
          }
        }
      if (from >= 0) {
        relabel(from, to);
        continue;
      }
    }
    break;
  }

  yInv = y.triangularView<Eigen::UnitUpper>().solve(CMatrix::Identity(n, n));
  out.rightVectors = q * y;
  out.leftVectors = (yInv * q.adjoint()).adjoint();
  out.blocks = CMatrix::Zero(n, n);
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.defectFlags.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) out.eigenvalues[static_cast<std::size_t>(i)] = t(i, i);
  for (const auto& r : ranges) {
    out.blocks.block(r.begin, r.begin, r.size, r.size) = t.block(r.begin, r.begin, r.size, r.size);
    EigenCluster c;
    c.begin = static_cast<std::size_t>(r.begin);
    c.size = static_cast<std::size_t>(r.size);
    Complex sum = 0.0;
    double strict = 0.0;
    for (Index i = r.begin; i < r.begin + r.size; ++i) {
      sum += t(i, i);
      c.maxModulus = std::max(c.maxModulus, std::abs(t(i, i)));
      for (Index j = i + 1; j < r.begin + r.size; ++j) strict += std::norm(t(i, j));
    }
    c.center = sum / double(r.size);
    c.nilpotentNorm = std::sqrt(strict);
    c.defective = c.nilpotentNorm > options.nilpotent * scale;
    for (std::size_t i = c.begin; i < c.begin + c.size; ++i) out.defectFlags[i] = c.defective;
    out.clusters.push_back(c);
  }
  return out;
}

}  // namespace qmcltl
