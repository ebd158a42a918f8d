#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "vpp/types.hpp"

namespace vpp {

struct PerturbationResult {
  CVector p;                      // Gaussian-integer perturbation
  double cost = 0.0;              // |G (a + p)|^2
  std::uint64_t nodes_visited = 0;
};

// fold to [-0.5, 0.5); ties at x.5 round up, so -1.5 -> -0.5
inline double mod_unit(double v) { return v - std::floor(v + 0.5); }

inline cplx modulo_cube(cplx x) { return cplx(mod_unit(x.real()), mod_unit(x.imag())); }

inline CVector modulo_cube(const CVector& x) {
  CVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = modulo_cube(x(i));
  return out;
}

namespace detail {

// lexicographic order on (re, im) pairs in component order
inline bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace detail

// Closest-point search on the lattice generated by a complex M x K matrix of
// full column rank. The complex problem is embedded as a 2K-dimensional real
// lattice (interleaved re/im coordinates) and solved by Schnorr-Euchner
// depth-first enumeration with radius shrinking. Construction factors the
// generator once; closest() may then be called for many targets.
class LatticeSearcher {
 public:
  explicit LatticeSearcher(const CMatrix& gen) : k_(static_cast<int>(gen.cols())) {
    const int m = static_cast<int>(gen.rows());
    if (m < k_) throw SingularGenerator("LatticeSearcher: wide generator");

    // columns sorted by ascending norm; larger columns last tend to leave a
    // larger trailing diagonal in R, which is enumerated first
    perm_.resize(k_);
    std::iota(perm_.begin(), perm_.end(), 0);
    std::vector<double> norms(k_);
    for (int j = 0; j < k_; ++j) norms[j] = gen.col(j).squaredNorm();
    std::stable_sort(perm_.begin(), perm_.end(),
                     [&](int a, int b) { return norms[a] < norms[b]; });

    b_ = Eigen::MatrixXd(2 * m, 2 * k_);
    for (int j = 0; j < k_; ++j) {
      const auto col = gen.col(perm_[j]);
      for (int i = 0; i < m; ++i) {
        b_(2 * i, 2 * j) = col(i).real();
        b_(2 * i + 1, 2 * j) = col(i).imag();
        b_(2 * i, 2 * j + 1) = -col(i).imag();
        b_(2 * i + 1, 2 * j + 1) = col(i).real();
      }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b_);
    r_ = qr.matrixQR().topRows(2 * k_).triangularView<Eigen::Upper>();
    qthin_ = qr.householderQ() * Eigen::MatrixXd::Identity(2 * m, 2 * k_);
    for (int i = 0; i < 2 * k_; ++i)
      if (std::abs(r_(i, i)) < 1e-12)
        throw SingularGenerator("LatticeSearcher: generator not full rank");
  }

  int dim() const { return k_; }

  PerturbationResult closest(const CVector& a) const {
    const int n = 2 * k_;
    Eigen::VectorXd areal(n);
    for (int j = 0; j < k_; ++j) {
      areal(2 * j) = a(perm_[j]).real();
      areal(2 * j + 1) = a(perm_[j]).imag();
    }
    // minimize |R u - yhat|^2 over integer u, where R u ~ lattice point and
    // yhat is the projected target -B a (no residual: B a lies in span(B))
    Eigen::VectorXd yhat = qthin_.transpose() * (-(b_ * areal));

    State st;
    st.u.assign(n, 0);
    st.best_u.assign(n, 0);
    st.centers.assign(n, 0.0);
    st.partial.assign(n + 1, 0.0);
    st.best = std::numeric_limits<double>::infinity();
    descend(n - 1, yhat, st);

    PerturbationResult out;
    out.p = CVector(k_);
    for (int j = 0; j < k_; ++j)
      out.p(perm_[j]) = cplx(st.best_u[2 * j], st.best_u[2 * j + 1]);
    out.cost = st.best;
    out.nodes_visited = st.nodes;
    return out;
  }

 private:
  struct State {
    std::vector<double> u, best_u, centers, partial;
    double best = 0.0;
    std::uint64_t nodes = 0;
  };

  CVector map_p(const std::vector<double>& u) const {
    CVector p(k_);
    for (int j = 0; j < k_; ++j) p(perm_[j]) = cplx(u[2 * j], u[2 * j + 1]);
    return p;
  }

  void descend(int level, const Eigen::VectorXd& yhat, State& st) const {
    const int n = 2 * k_;
    double c = yhat(level);
    for (int j = level + 1; j < n; ++j) c -= r_(level, j) * st.u[j];
    c /= r_(level, level);

    double u0 = std::floor(c + 0.5);
    double step = (c - u0 >= 0.0) ? 1.0 : -1.0;
    double cand = u0;
    // zig-zag enumeration: |cand - c| is nondecreasing, so the first candidate
    // over the radius ends the level
    for (int iter = 0;; ++iter) {
      double diff = r_(level, level) * (cand - c);
      double t = st.partial[level + 1] + diff * diff;
      ++st.nodes;
      double eps = 1e-12 * (1.0 + std::min(st.best, t));
      if (t > st.best + eps) break;
      st.u[level] = cand;
      if (level == 0) {
        if (t < st.best - eps) {
          st.best = t;
          st.best_u = st.u;
        } else {
          // equal cost within tolerance: keep the lexicographically smaller p
          CVector pc = map_p(st.u);
          CVector pb = map_p(st.best_u);
          if (detail::lex_less(pc, pb)) st.best_u = st.u;
          st.best = std::min(st.best, t);
        }
      } else {
        st.partial[level] = t;
        descend(level - 1, yhat, st);
      }
      if (iter == 0) {
        cand = u0 + step;
      } else if (iter % 2 == 1) {
        cand = 2.0 * u0 - cand;  // mirror to the other side
      } else {
        cand = 2.0 * u0 - cand + step;
      }
    }
  }

  int k_;
  Eigen::MatrixXd b_;      // real embedding, 2M x 2K
  Eigen::MatrixXd r_;      // upper triangular, 2K x 2K
  Eigen::MatrixXd qthin_;  // 2M x 2K
  std::vector<int> perm_;
};

// Global minimizer of |F (a + q)|^2 over Gaussian-integer vectors q.
inline PerturbationResult closest_point(const CMatrix& f, const CVector& a) {
  return LatticeSearcher(f).closest(a);
}

// Exhaustive test oracle over the integer box [-box_radius, box_radius]^{2K}.
inline PerturbationResult brute_force_closest(const CMatrix& f, const CVector& a,
                                              int box_radius) {
  const int k = static_cast<int>(f.cols());
  if (k > 4) throw DomainError("brute_force_closest: K > 4");
  const int side = 2 * box_radius + 1;
  std::uint64_t total = 1;
  for (int i = 0; i < 2 * k; ++i) total *= side;

  PerturbationResult best;
  best.cost = std::numeric_limits<double>::infinity();
  CVector q(k);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rem = idx;
    for (int j = 0; j < k; ++j) {
      int re = static_cast<int>(rem % side) - box_radius;
      rem /= side;
      int im = static_cast<int>(rem % side) - box_radius;
      rem /= side;
      q(j) = cplx(re, im);
    }
    double cost = (f * (a + q)).squaredNorm();
    ++best.nodes_visited;
    double eps = 1e-12 * (1.0 + std::min(best.cost, cost));
    if (cost < best.cost - eps ||
        (cost <= best.cost + eps && detail::lex_less(q, best.p))) {
      best.cost = std::min(best.cost, cost);
      best.p = q;
    }
  }
  // certify the box: any q with cost <= best.cost satisfies
  // sigma_min |a_j + q_j| <= sqrt(best.cost) per component, so the global
  // minimizer provably lies inside a box of the radius computed here
  Eigen::JacobiSVD<CMatrix> svd(f);
  double smin = svd.singularValues()(k - 1);
  double amax = 0.0;
  for (int j = 0; j < k; ++j)
    amax = std::max({amax, std::abs(a(j).real()), std::abs(a(j).imag())});
  double req = amax + std::sqrt(best.cost) / smin;
  if (!(req < 1e6))
    throw SingularGenerator("brute_force_closest: generator numerically singular");
  int needed = static_cast<int>(std::floor(req));
  if (needed > box_radius)
    throw BoxTooSmall("brute_force_closest: box cannot be certified", needed);
  for (int j = 0; j < k; ++j) {
    if (std::abs(best.p(j).real()) == box_radius ||
        std::abs(best.p(j).imag()) == box_radius)
      throw BoxTooSmall("brute_force_closest: minimizer on box boundary",
                        std::max(needed, box_radius + 1));
  }
  return best;
}

}  // namespace vpp
