#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "vpp/engine.hpp"
#include "vpp/linalg.hpp"
#include "vpp/types.hpp"

namespace vpp {

struct AllocationResult {
  RVector lambda;       // full length K, zeros for deactivated users
  double zeta = 0.0;    // water level
  int iterations = 0;
  bool converged = false;
  double ese_final = 0.0;  // Monte-Carlo estimate at the converged allocation
};

// lambda_k^2 = max{0, zeta - 1/delta_k^2} with zeta making sum lambda^2 = 1.
// Solved by sorting the inverse gains and scanning active-set sizes.
inline std::pair<RVector, double> waterfill_once(const RVector& delta_sq) {
  const int k = static_cast<int>(delta_sq.size());
  if (k < 1) throw DomainError("waterfill_once: empty input");
  std::vector<double> inv(k);
  for (int i = 0; i < k; ++i) {
    if (!(delta_sq(i) > 0)) throw DomainError("waterfill_once: nonpositive delta^2");
    inv[i] = 1.0 / delta_sq(i);
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return inv[a] < inv[b]; });

  double zeta = 0.0;
  int active = 0;
  double prefix = 0.0;
  for (int m = 1; m <= k; ++m) {
    prefix += inv[order[m - 1]];
    double z = (1.0 + prefix) / m;
    if (z > inv[order[m - 1]] && (m == k || z <= inv[order[m]])) {
      zeta = z;
      active = m;
    }
  }
  RVector lambda = RVector::Zero(k);
  for (int i = 0; i < active; ++i) {
    int idx = order[i];
    lambda(idx) = std::sqrt(zeta - inv[idx]);
  }
  return {lambda, zeta};
}

// Iterative allocation: waterfill against delta_k^2 = P d_k^2 / E_se, refreshing
// E_se from the closed-form bound with generator V^+ Lambda between rounds.
// Users driven to lambda = 0 drop out; the remaining subsystem is re-decomposed
// so the diagonal gains stay consistent with the shrunken channel.
inline AllocationResult allocate(const CMatrix& h, double p_snr, int max_iters = 50,
                                 double tol = 1e-6, std::uint64_t ese_samples = 2000,
                                 std::uint64_t seed = 0) {
  if (!(p_snr > 0)) throw DomainError("allocate: nonpositive SNR");
  const int k_full = static_cast<int>(h.rows());
  std::vector<int> active(k_full);
  std::iota(active.begin(), active.end(), 0);

  auto subsystem = [&](const std::vector<int>& rows) {
    CMatrix hs(rows.size(), h.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) hs.row(i) = h.row(rows[i]);
    return hs;
  };

  CMatrix h_act = h;
  RVector d = dvq_decompose(h_act).d;
  int k = k_full;
  // step 1: lower bound at Lambda = I
  RVector lambda_act = RVector::Ones(k);
  double ese = ese_lower_bound_ra(lambda_act, k);

  AllocationResult out;
  out.lambda = RVector::Zero(k_full);
  double zeta = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    out.iterations = it;
    RVector delta_sq(k);
    for (int i = 0; i < k; ++i) delta_sq(i) = (p_snr / ese) * d(i) * d(i);
    auto [lambda_new, z] = waterfill_once(delta_sq);
    zeta = z;

    std::vector<int> still;
    for (int i = 0; i < k; ++i)
      if (lambda_new(i) > 0.0) still.push_back(i);
    if (still.empty()) throw NoActiveUsers("allocate: all users deactivated");

    if (static_cast<int>(still.size()) < k) {
      std::vector<int> next_active;
      RVector shrunk(still.size());
      for (std::size_t i = 0; i < still.size(); ++i) {
        next_active.push_back(active[still[i]]);
        shrunk(i) = lambda_new(still[i]);
      }
      active = std::move(next_active);
      k = static_cast<int>(active.size());
      h_act = subsystem(active);
      d = dvq_decompose(h_act).d;
      // renormalize onto the shrunken set and continue iterating
      lambda_act = shrunk / shrunk.norm();
      ese = ese_lower_bound_ra(lambda_act, k);
      continue;
    }

    double max_change = (lambda_new - lambda_act).cwiseAbs().maxCoeff();
    lambda_act = lambda_new;
    ese = ese_lower_bound_ra(lambda_act, k);
    if (max_change < tol) {
      out.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < active.size(); ++i) out.lambda(active[i]) = lambda_act(i);
  out.zeta = zeta;
  PrecoderConfig cfg{PrecoderMode::RateAllocated, h_act, lambda_act, p_snr};
  out.ese_final = estimate_ese(cfg, ese_samples, seed).mean;
  return out;
}

}  // namespace vpp
