#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "vpp/types.hpp"

namespace vpp {

// Moore-Penrose pseudoinverse via SVD. Requires full row rank (K <= N_T).
inline CMatrix pseudoinverse(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = kRankTol * sv(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  if (rank < m.rows())
    throw RankDeficient("pseudoinverse: numerical rank below row count");
  RVector inv = sv.head(rank).cwiseInverse();
  return svd.matrixV().leftCols(rank) * inv.asDiagonal() *
         svd.matrixU().leftCols(rank).adjoint();
}

// ln det(H H^dag) through the triangular factor of H^dag; -inf for rank-deficient H.
inline double log_gram_det(const CMatrix& h) {
  Eigen::HouseholderQR<CMatrix> qr(h.adjoint());
  double acc = 0.0;
  const Eigen::Index k = h.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    double d = std::abs(qr.matrixQR()(i, i));
    if (d <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * std::log(d);
  }
  return acc;
}

inline double gram_det(const CMatrix& h) {
  double ld = log_gram_det(h);
  return std::isfinite(ld) ? std::exp(ld) : 0.0;
}

// H = diag(d) * V * Q with d real positive, V unit-diagonal lower triangular,
// Q having orthonormal rows.
struct DvqFactors {
  RVector d;
  CMatrix v;
  CMatrix q;
};

inline DvqFactors dvq_decompose(const CMatrix& h) {
  const Eigen::Index k = h.rows();
  const Eigen::Index n_t = h.cols();
  if (k > n_t) throw RankDeficient("dvq_decompose: K > N_T");
  Eigen::HouseholderQR<CMatrix> qr(h.adjoint());
  CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  CMatrix qthin = qr.householderQ() * CMatrix::Identity(n_t, k);

  CMatrix l = r.adjoint();        // lower triangular, H = l * qthin^dag
  CMatrix q = qthin.adjoint();    // K x N_T, orthonormal rows

  double dmax = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) dmax = std::max(dmax, std::abs(l(i, i)));
  DvqFactors out;
  out.d = RVector(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double mag = std::abs(l(i, i));
    if (mag <= kRankTol * dmax)
      throw RankDeficient("dvq_decompose: rank-deficient channel");
    // rotate the phase of column i of L into row i of Q so d_i is real positive
    cplx phase = l(i, i) / mag;
    l.col(i) /= phase;
    q.row(i) *= phase;
    out.d(i) = mag;
  }
  out.v = CMatrix(k, k);
  for (Eigen::Index i = 0; i < k; ++i) out.v.row(i) = l.row(i) / out.d(i);
  out.q = std::move(q);
  return out;
}

// g_u = h_u (I - sum_s g_s^dag g_s / |g_s|^2) for mutually orthogonal basis rows.
inline CRowVector ortho_component(const CRowVector& h_u,
                                  const std::vector<CRowVector>& basis) {
  CRowVector g = h_u;
  for (const auto& gs : basis) {
    double n2 = gs.squaredNorm();
    if (n2 < 1e-12)
      throw DegenerateBasis("ortho_component: basis vector with negligible norm");
    cplx inner = (g * gs.adjoint())(0, 0);
    g -= (inner / n2) * gs;
  }
  return g;
}

}  // namespace vpp
