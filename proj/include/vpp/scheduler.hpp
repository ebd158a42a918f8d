#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vpp/engine.hpp"
#include "vpp/linalg.hpp"
#include "vpp/rates.hpp"
#include "vpp/types.hpp"

namespace vpp {

struct ChannelSet {
  std::vector<CRowVector> users;
  int n_t = 0;
};

struct SelectionTrace {
  std::vector<int> selected;
  std::vector<std::vector<int>> shed_log;  // one entry per completed iteration
  double log_det_w = 0.0;                  // ln det(W(S)), accumulated
  std::uint64_t vec_mults = 0;
  std::vector<double> per_iter_g_norms;    // |g|^2 of each picked user
};

// rate-based shedding threshold: drop u when |g_u|^2 falls below the value at
// which adding u would decrease the high-SNR sum-rate upper bound (the exact
// first-difference of the bound in K)
inline double grm_shed_threshold(int k, double p_snr) {
  double kk = static_cast<double>(k);
  return std::exp(1.0 + (2.0 * kk + 2.0) * std::log(kk + 1.0) - std::log(p_snr) -
                  kk * std::log(kk) - (kk + 1.0) * std::log(kk + 2.0));
}

namespace detail {

struct Candidate {
  int index;
  CRowVector g;
  double norm2;
  cplx pending_inner;  // projection coefficient awaiting materialization
};

inline std::vector<Candidate> init_candidates(const ChannelSet& ch) {
  std::vector<Candidate> cand;
  cand.reserve(ch.users.size());
  for (std::size_t u = 0; u < ch.users.size(); ++u)
    cand.push_back({static_cast<int>(u), ch.users[u], ch.users[u].squaredNorm(), {}});
  return cand;
}

inline std::size_t argmax_norm(const std::vector<Candidate>& cand) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cand.size(); ++i)
    if (cand[i].norm2 > cand[best].norm2) best = i;  // ties keep lowest index
  return best;
}

}  // namespace detail

// Greedy rate maximization (GRM): greedy det(W) growth via |g_u|^2 with
// rate-based shedding. Vector-multiplication accounting: each candidate costs
// one inner product per iteration to refresh its orthogonal component's norm;
// candidates kept after shedding cost one more to materialize the update.
inline SelectionTrace grm_select(const ChannelSet& ch, double p_snr) {
  if (!(p_snr > 0)) throw DomainError("grm_select: nonpositive SNR");
  SelectionTrace tr;
  auto cand = detail::init_candidates(ch);
  const CRowVector* g_last = nullptr;
  std::vector<CRowVector> picked_g;
  picked_g.reserve(std::min<std::size_t>(ch.users.size(), ch.n_t));

  while (!cand.empty() && static_cast<int>(tr.selected.size()) < ch.n_t) {
    if (g_last != nullptr) {
      double gl2 = g_last->squaredNorm();
      for (auto& c : cand) {
        c.pending_inner = (c.g * g_last->adjoint())(0, 0);
        c.norm2 -= std::norm(c.pending_inner) / gl2;
        c.norm2 = std::max(c.norm2, 0.0);
        tr.vec_mults += 1;
      }
    }
    std::size_t imax = detail::argmax_norm(cand);
    int umax = cand[imax].index;

    std::vector<int> shed;
    const int k_now = static_cast<int>(tr.selected.size());
    if (k_now > 1) {
      double thresh = grm_shed_threshold(k_now, p_snr);
      std::vector<detail::Candidate> kept;
      kept.reserve(cand.size());
      for (auto& c : cand) {
        if (c.norm2 < thresh)
          shed.push_back(c.index);
        else
          kept.push_back(std::move(c));
      }
      cand = std::move(kept);
    }
    tr.shed_log.push_back(std::move(shed));
    bool umax_alive = std::any_of(cand.begin(), cand.end(),
                                  [&](const auto& c) { return c.index == umax; });
    if (!umax_alive) break;  // u_max maximizes |g|^2, so every candidate failed

    if (g_last != nullptr) {
      double gl2 = g_last->squaredNorm();
      for (auto& c : cand) {
        c.g -= (c.pending_inner / gl2) * (*g_last);
        tr.vec_mults += 1;
      }
    }
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (cand[i].index == umax) {
        tr.selected.push_back(umax);
        tr.per_iter_g_norms.push_back(cand[i].norm2);
        tr.log_det_w += std::log(cand[i].norm2);
        picked_g.push_back(std::move(cand[i].g));
        cand.erase(cand.begin() + i);
        break;
      }
    }
    g_last = &picked_g.back();
  }
  return tr;
}

// Semi-orthogonal user selection: same greedy pick, shedding by angular
// threshold against the most recently selected orthogonal component. Each
// candidate costs 3 vector multiplications per iteration (projection update
// pair plus the semi-orthogonality check).
inline SelectionTrace sus_select(const ChannelSet& ch, double p_snr, double alpha) {
  if (!(p_snr > 0)) throw DomainError("sus_select: nonpositive SNR");
  if (alpha < 0.0 || alpha > 1.0) throw DomainError("sus_select: alpha outside [0,1]");
  SelectionTrace tr;
  auto cand = detail::init_candidates(ch);
  std::vector<CRowVector> picked_g;
  picked_g.reserve(std::min<std::size_t>(ch.users.size(), ch.n_t));

  while (!cand.empty() && static_cast<int>(tr.selected.size()) < ch.n_t) {
    std::size_t imax = detail::argmax_norm(cand);
    tr.selected.push_back(cand[imax].index);
    tr.per_iter_g_norms.push_back(cand[imax].norm2);
    tr.log_det_w += std::log(cand[imax].norm2);
    picked_g.push_back(std::move(cand[imax].g));
    cand.erase(cand.begin() + imax);
    const CRowVector& gs = picked_g.back();
    double gs2 = gs.squaredNorm();

    std::vector<int> shed;
    std::vector<detail::Candidate> kept;
    kept.reserve(cand.size());
    for (auto& c : cand) {
      tr.vec_mults += 3;
      const CRowVector& h_u = ch.users[c.index];
      double cos2 = std::norm((h_u * gs.adjoint())(0, 0)) / (h_u.squaredNorm() * gs2);
      if (cos2 > alpha * alpha) {
        shed.push_back(c.index);
      } else {
        cplx inner = (c.g * gs.adjoint())(0, 0);
        c.g -= (inner / gs2) * gs;
        c.norm2 = std::max(c.norm2 - std::norm(inner) / gs2, 0.0);
        kept.push_back(std::move(c));
      }
    }
    cand = std::move(kept);
    tr.shed_log.push_back(std::move(shed));
  }
  return tr;
}

// greedy det(W) growth with no shedding at all
inline SelectionTrace greedy_zf_select(const ChannelSet& ch, double p_snr) {
  if (!(p_snr > 0)) throw DomainError("greedy_zf_select: nonpositive SNR");
  SelectionTrace tr;
  auto cand = detail::init_candidates(ch);
  std::vector<CRowVector> picked_g;
  picked_g.reserve(std::min<std::size_t>(ch.users.size(), ch.n_t));

  while (!cand.empty() && static_cast<int>(tr.selected.size()) < ch.n_t) {
    std::size_t imax = detail::argmax_norm(cand);
    if (cand[imax].norm2 < 1e-12) break;
    tr.selected.push_back(cand[imax].index);
    tr.per_iter_g_norms.push_back(cand[imax].norm2);
    tr.log_det_w += std::log(cand[imax].norm2);
    picked_g.push_back(std::move(cand[imax].g));
    cand.erase(cand.begin() + imax);
    tr.shed_log.emplace_back();
    const CRowVector& gs = picked_g.back();
    double gs2 = gs.squaredNorm();
    for (auto& c : cand) {
      cplx inner = (c.g * gs.adjoint())(0, 0);
      c.g -= (inner / gs2) * gs;
      c.norm2 = std::max(c.norm2 - std::norm(inner) / gs2, 0.0);
      tr.vec_mults += 2;
    }
  }
  return tr;
}

// VP-ES: evaluate the exact sum rate (Monte-Carlo E_se) for every nonempty
// subset of size <= N_T and return the best. Desk-scale only.
inline SelectionTrace exhaustive_select(const ChannelSet& ch, double p_snr,
                                        std::uint64_t ese_samples,
                                        std::uint64_t seed = 0) {
  const int u_count = static_cast<int>(ch.users.size());
  if (u_count > 12) throw TooManyUsers("exhaustive_select: U > 12");
  double best_rate = -std::numeric_limits<double>::infinity();
  std::vector<int> best_set;
  for (std::uint32_t mask = 1; mask < (1u << u_count); ++mask) {
    std::vector<int> subset;
    for (int u = 0; u < u_count; ++u)
      if (mask & (1u << u)) subset.push_back(u);
    if (static_cast<int>(subset.size()) > ch.n_t) continue;
    CMatrix h(subset.size(), ch.n_t);
    for (std::size_t i = 0; i < subset.size(); ++i) h.row(i) = ch.users[subset[i]];
    double rate;
    try {
      PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, p_snr};
      EseEstimate est = estimate_ese(cfg, ese_samples, seed + mask);
      rate = sum_rate_exact(est.mean, p_snr, static_cast<int>(subset.size()));
    } catch (const RankDeficient&) {
      continue;
    }
    if (rate > best_rate) {
      best_rate = rate;
      best_set = subset;
    }
  }
  SelectionTrace tr;
  tr.selected = best_set;
  CMatrix h(best_set.size(), ch.n_t);
  for (std::size_t i = 0; i < best_set.size(); ++i) h.row(i) = ch.users[best_set[i]];
  tr.log_det_w = log_gram_det(h);
  return tr;
}

}  // namespace vpp
