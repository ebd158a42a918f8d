#pragma once

#include <array>
#include <cmath>

#include "vpp/linalg.hpp"
#include "vpp/types.hpp"

namespace vpp {

namespace detail {

// 16-point Gauss-Legendre rule on [-1, 1]
inline constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

// modulo-Gaussian density on [-1/2, 1/2]: sum of Gaussian replicas at the integers
inline double mod_gauss_pdf(double xi, double gamma, int smax) {
  double f = 0.0;
  for (int s = -smax; s <= smax; ++s) {
    double d = xi - s;
    f += std::exp(-d * d / (2.0 * gamma));
  }
  return f / std::sqrt(2.0 * M_PI * gamma);
}

// -integral f ln f over [-1/2, 1/2] (nats), composite Gauss-Legendre
inline double mod_gauss_entropy_nats(double gamma, int panels) {
  const int smax = static_cast<int>(std::ceil(6.0 * std::sqrt(gamma))) + 2;
  const double w = 1.0 / panels;
  double h = 0.0;
  for (int p = 0; p < panels; ++p) {
    double mid = -0.5 + (p + 0.5) * w;
    double panel = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        double xi = mid + sgn * 0.5 * w * kGlNodes[i];
        double f = mod_gauss_pdf(xi, gamma, smax);
        if (f > 0.0) panel += kGlWeights[i] * (-f * std::log(f));
      }
    }
    h += 0.5 * w * panel;
  }
  return h;
}

}  // namespace detail

// Omega(gamma) = 1/2 log2(2 pi e gamma) - H(xi), the modulo penalty on Gaussian
// noise entropy, in bits. Above gamma = 30 the folded density is uniform to
// well below 1e-9 and the closed-form limit is returned.
inline double omega(double gamma) {
  if (!(gamma > 0)) throw DomainError("omega: gamma must be positive");
  double half_log = 0.5 * std::log2(2.0 * M_PI * M_E * gamma);
  if (gamma > 30.0) return half_log;
  double sigma = std::sqrt(gamma);
  int panels = static_cast<int>(std::ceil(6.0 / std::max(sigma, 1.5e-3)));
  panels = std::min(std::max(panels, 64), 4096);
  double h_bits = detail::mod_gauss_entropy_nats(gamma, panels) / std::log(2.0);
  return std::max(half_log - h_bits, 0.0);
}

// Theorem-1 sum rate: K log2(P/K) - K log2(pi e ese / K) + 2K Omega(ese / 2P)
inline double sum_rate_exact(double ese, double p_snr, int k) {
  if (!(ese > 0) || !(p_snr > 0) || k < 1)
    throw DomainError("sum_rate_exact: nonpositive input");
  double kk = static_cast<double>(k);
  return kk * std::log2(p_snr / kk) - kk * std::log2(M_PI * M_E * ese / kk) +
         2.0 * kk * omega(ese / (2.0 * p_snr));
}

// high-SNR lower bound; may be negative, callers clamp for display
inline double sum_rate_lower(double ese, double p_snr, int k) {
  if (!(ese > 0) || !(p_snr > 0) || k < 1)
    throw DomainError("sum_rate_lower: nonpositive input");
  double kk = static_cast<double>(k);
  return kk * std::log2(p_snr / kk) - kk * std::log2(M_PI * M_E * ese / kk);
}

// K log2(P/K) + log2 det(W) - K log2(Gamma(K+1)^{1/K} e / (K+1)), W = H H^dag
inline double sum_rate_upper(const CMatrix& h, double p_snr) {
  if (!(p_snr > 0)) throw DomainError("sum_rate_upper: nonpositive SNR");
  const int k = static_cast<int>(h.rows());
  double ld = log_gram_det(h);
  if (!std::isfinite(ld)) throw RankDeficient("sum_rate_upper: rank-deficient channel");
  double kk = static_cast<double>(k);
  double log2e = 1.0 / std::log(2.0);
  return kk * std::log2(p_snr / kk) + ld * log2e -
         kk * ((std::lgamma(kk + 1.0) / kk + 1.0 - std::log(kk + 1.0)) * log2e);
}

// single-user term of Corollary 3 (the K/K factors cancel)
inline double mi_exact(double lambda_k, double d_k, double ese, double p_snr) {
  if (!(lambda_k > 0) || !(d_k > 0) || !(ese > 0) || !(p_snr > 0))
    throw DomainError("mi_exact: nonpositive input");
  double g2 = p_snr * lambda_k * lambda_k * d_k * d_k;
  return std::log2(g2 / (M_PI * M_E * ese)) + 2.0 * omega(ese / (2.0 * g2));
}

inline double sum_rate_ra(double ese, double p_snr, const RVector& lambda,
                          const RVector& d) {
  if (!(ese > 0) || !(p_snr > 0) || lambda.size() != d.size() || lambda.size() < 1)
    throw DomainError("sum_rate_ra: bad input");
  double r = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    r += mi_exact(lambda(i), d(i), ese, p_snr);
  return r;
}

// max{0, log2(P lambda^2 d^2 / (pi e ese))}
inline double mi_piecewise(double lambda_k, double d_k, double ese, double p_snr) {
  if (!(lambda_k > 0) || !(d_k > 0) || !(ese > 0) || !(p_snr > 0))
    throw DomainError("mi_piecewise: nonpositive input");
  double g2 = p_snr * lambda_k * lambda_k * d_k * d_k;
  return std::max(0.0, std::log2(g2 / (M_PI * M_E * ese)));
}

// Gaussian-channel expression matched at the SNR extremes
inline double mi_awgn(double lambda_k, double d_k, double ese, double p_snr) {
  if (!(lambda_k > 0) || !(d_k > 0) || !(ese > 0) || !(p_snr > 0))
    throw DomainError("mi_awgn: nonpositive input");
  double g2 = p_snr * lambda_k * lambda_k * d_k * d_k;
  return std::log2(1.0 + g2 / (M_PI * M_E * ese));
}

inline double r_vp_pw(const RVector& lambda, const RVector& d, double ese,
                      double p_snr) {
  if (lambda.size() != d.size() || lambda.size() < 1)
    throw DomainError("r_vp_pw: size mismatch");
  double r = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    r += mi_piecewise(lambda(i), d(i), ese, p_snr);
  return r;
}

struct RateReport {
  double r_exact = 0.0;
  double r_lower = 0.0;
  double r_upper = 0.0;
  double omega_term = 0.0;
  double gamma = 0.0;  // ese / 2P
  int k_users = 0;
};

inline RateReport rate_report(const CMatrix& h, double ese, double p_snr) {
  RateReport rep;
  rep.k_users = static_cast<int>(h.rows());
  rep.gamma = ese / (2.0 * p_snr);
  rep.omega_term = omega(rep.gamma);
  rep.r_lower = sum_rate_lower(ese, p_snr, rep.k_users);
  rep.r_exact = rep.r_lower + 2.0 * rep.k_users * rep.omega_term;
  rep.r_upper = sum_rate_upper(h, p_snr);
  return rep;
}

}  // namespace vpp
