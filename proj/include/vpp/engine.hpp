#pragma once

#include <cmath>
#include <cstdint>

#include "vpp/lattice.hpp"
#include "vpp/linalg.hpp"
#include "vpp/rng.hpp"
#include "vpp/types.hpp"

namespace vpp {

enum class PrecoderMode { ChannelInverse, RateAllocated };

// Channel-inverse mode: F = H^+.
// Rate-allocated mode: F = Q^dag V^+ Lambda with (D, V, Q) = dvq_decompose(H);
// the perturbation is searched on the K x K generator V^+ Lambda, whose cost
// equals |F (a+q)|^2 because Q^dag has orthonormal columns.
struct PrecoderConfig {
  PrecoderMode mode = PrecoderMode::ChannelInverse;
  CMatrix h;
  RVector lambda;  // RateAllocated only
  double snr_p = 1.0;
};

struct EseEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

namespace detail {

inline CMatrix unit_lower_inverse(const CMatrix& v) {
  return v.triangularView<Eigen::Lower>().solve(CMatrix::Identity(v.rows(), v.cols()));
}

}  // namespace detail

// K x K (or N_T x K) matrix whose lattice the perturbation search runs on
inline CMatrix perturbation_generator(const PrecoderConfig& cfg) {
  if (cfg.mode == PrecoderMode::ChannelInverse) return pseudoinverse(cfg.h);
  DvqFactors f = dvq_decompose(cfg.h);
  return detail::unit_lower_inverse(f.v) * cfg.lambda.asDiagonal();
}

inline CMatrix precoder_matrix(const PrecoderConfig& cfg) {
  if (cfg.mode == PrecoderMode::ChannelInverse) return pseudoinverse(cfg.h);
  DvqFactors f = dvq_decompose(cfg.h);
  return f.q.adjoint() * detail::unit_lower_inverse(f.v) * cfg.lambda.asDiagonal();
}

// per-user gain seen at the demodulator: 1 in channel-inverse mode, lambda_k d_k otherwise
inline RVector effective_gains(const PrecoderConfig& cfg) {
  if (cfg.mode == PrecoderMode::ChannelInverse)
    return RVector::Ones(cfg.h.rows());
  DvqFactors f = dvq_decompose(cfg.h);
  return cfg.lambda.cwiseProduct(f.d);
}

// x = sqrt(P / ese) * F * (a + p)
inline CVector encode(const PrecoderConfig& cfg, const CVector& a, double ese) {
  if (!(ese > 0)) throw DomainError("encode: ese must be positive");
  PerturbationResult pr = closest_point(perturbation_generator(cfg), a);
  return std::sqrt(cfg.snr_p / ese) * (precoder_matrix(cfg) * (a + pr.p));
}

// Monte-Carlo estimate of E_se: mean of min_q |G (a+q)|^2 over uniform a in CUBE.
// Sample i draws from the counter stream (seed, i), so the estimate does not
// depend on evaluation order.
inline EseEstimate estimate_ese(const PrecoderConfig& cfg, std::uint64_t samples,
                                std::uint64_t seed) {
  if (samples < 100) throw DomainError("estimate_ese: needs at least 100 samples");
  LatticeSearcher searcher(perturbation_generator(cfg));
  const int k = searcher.dim();
  double sum = 0.0, sum_c = 0.0;    // Kahan-compensated
  double sumsq = 0.0, sumsq_c = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(seed, i);
    CVector a = random_cube_point(k, rng);
    double cost = searcher.closest(a).cost;
    double y = cost - sum_c;
    double t = sum + y;
    sum_c = (t - sum) - y;
    sum = t;
    double y2 = cost * cost - sumsq_c;
    double t2 = sumsq + y2;
    sumsq_c = (t2 - sumsq) - y2;
    sumsq = t2;
  }
  EseEstimate est;
  est.samples = samples;
  est.mean = sum / static_cast<double>(samples);
  double var = (sumsq - static_cast<double>(samples) * est.mean * est.mean) /
               static_cast<double>(samples - 1);
  est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
  return est;
}

// closed-form lower bound K Gamma(K+1)^{1/K} / ((K+1) pi) * det(G^dag G)^{1/K}
inline double ese_lower_bound(const CMatrix& g) {
  const int k = static_cast<int>(g.cols());
  Eigen::HouseholderQR<CMatrix> qr(g);
  double log_det = 0.0;  // ln det(G^dag G)
  for (int i = 0; i < k; ++i) {
    double d = std::abs(qr.matrixQR()(i, i));
    if (d < 1e-12) throw SingularGenerator("ese_lower_bound: singular generator");
    log_det += 2.0 * std::log(d);
  }
  return std::exp(std::log(static_cast<double>(k)) + std::lgamma(k + 1.0) / k -
                  std::log(k + 1.0) - std::log(M_PI) + log_det / k);
}

// Eq-10 bound specialized to the rate-allocated generator V^+ Lambda:
// det(V) = 1, so det(G^dag G) = det(Lambda^2) = prod lambda_k^2.
inline double ese_lower_bound_ra(const RVector& lambda, int k) {
  double log_det = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(lambda(i) > 0)) throw SingularGenerator("ese_lower_bound_ra: zero lambda");
    log_det += 2.0 * std::log(lambda(i));
  }
  return std::exp(std::log(static_cast<double>(k)) + std::lgamma(k + 1.0) / k -
                  std::log(k + 1.0) - std::log(M_PI) + log_det / k);
}

// a_hat = [ sqrt(ese / (P gain^2)) y ] mod CUBE
inline cplx demodulate(cplx y, double gain, double ese, double p_snr) {
  if (!(gain > 0)) throw DomainError("demodulate: gain must be positive");
  return modulo_cube(std::sqrt(ese / (p_snr * gain * gain)) * y);
}

}  // namespace vpp
