#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vpp/engine.hpp"
#include "vpp/rng.hpp"

using namespace vpp;

TEST_CASE("encode on the scalar identity channel") {
  CMatrix h = CMatrix::Identity(1, 1);
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, 1.0};
  CVector a(1);
  a << cplx(0.3, 0.0);
  CVector x = encode(cfg, a, 1.0);
  CHECK(std::abs(x(0) - cplx(0.3, 0.0)) < 1e-12);
}

TEST_CASE("encode norm on the identity channel") {
  CMatrix h = CMatrix::Identity(2, 2);
  const double p = 4.0, ese = 0.25;
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, p};
  Rng rng(31, 0);
  for (int t = 0; t < 50; ++t) {
    CVector a = random_cube_point(2, rng);
    CVector x = encode(cfg, a, ese);
    CHECK(x.squaredNorm() == doctest::Approx((p / ese) * a.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("average transmit power matches the configured P") {
  Rng rng(32, 0);
  CMatrix h = gen_channel(4, 4, rng);
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, 7.5};
  double ese = estimate_ese(cfg, 4000, 77).mean;
  CMatrix f = precoder_matrix(cfg);
  LatticeSearcher searcher(perturbation_generator(cfg));
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Rng draw(99, static_cast<std::uint64_t>(i));
    CVector a = random_cube_point(4, draw);
    CVector p = searcher.closest(a).p;
    acc += (cfg.snr_p / ese) * (f * (a + p)).squaredNorm();
  }
  CHECK(acc / n / cfg.snr_p == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("scalar identity generator has mean perturbed power 1/6") {
  CMatrix h = CMatrix::Identity(1, 1);
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, 1.0};
  EseEstimate est = estimate_ese(cfg, 20000, 5);
  CHECK(est.mean == doctest::Approx(1.0 / 6.0).epsilon(0.03));
  CHECK(est.std_error > 0.0);
  CHECK(est.samples == 20000);
}

TEST_CASE("estimate_ese requires a minimum sample count") {
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, CMatrix::Identity(1, 1), {}, 1.0};
  CHECK_THROWS_AS(estimate_ese(cfg, 10, 0), DomainError);
}

TEST_CASE("scaling the channel scales the estimate by 1/c^2 exactly") {
  // F = H^+ shrinks by 1/c when H grows by c; same seed draws the same symbols
  Rng rng(33, 0);
  CMatrix h = gen_channel(2, 2, rng);
  const double c = 3.0;
  PrecoderConfig base{PrecoderMode::ChannelInverse, h, {}, 1.0};
  PrecoderConfig scaled{PrecoderMode::ChannelInverse, c * h, {}, 1.0};
  double m1 = estimate_ese(base, 500, 9).mean;
  double m2 = estimate_ese(scaled, 500, 9).mean;
  CHECK(m2 == doctest::Approx(m1 / (c * c)).epsilon(1e-8));
}

TEST_CASE("closed-form lower bound on simple generators") {
  CHECK(ese_lower_bound(CMatrix::Identity(1, 1)) == doctest::Approx(1.0 / (2.0 * M_PI)));

  Rng rng(34, 0);
  CMatrix g = gen_channel(3, 3, rng);
  const double c = 2.5;
  CHECK(ese_lower_bound(c * g) ==
        doctest::Approx(c * c * ese_lower_bound(g)).epsilon(1e-10));
}

TEST_CASE("Monte-Carlo estimate respects the closed-form lower bound") {
  Rng rng(35, 0);
  for (int t = 0; t < 30; ++t) {
    CMatrix h = gen_channel(2, 2, rng);
    PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, 1.0};
    EseEstimate est = estimate_ese(cfg, 1000, 100 + t);
    double lb = ese_lower_bound(perturbation_generator(cfg));
    CHECK(est.mean >= lb - 3.0 * est.std_error);
  }
}

TEST_CASE("rate-allocated bound specialization matches the general form") {
  Rng rng(36, 0);
  CMatrix h = gen_channel(3, 5, rng);
  RVector lambda(3);
  lambda << 0.8, 0.5, 0.33166247903554;  // unit sum of squares
  PrecoderConfig cfg{PrecoderMode::RateAllocated, h, lambda, 1.0};
  double general = ese_lower_bound(perturbation_generator(cfg));
  double special = ese_lower_bound_ra(lambda, 3);
  CHECK(special == doctest::Approx(general).epsilon(1e-9));
}

TEST_CASE("channel-inverse mode equals rate-allocated mode with lambda = 1/d") {
  // F = Q^dag V^+ Lambda reduces to H^+ = Q^dag V^+ D^{-1} at Lambda = D^{-1},
  // so the two modes share one perturbed-power statistic
  Rng rng(37, 0);
  CMatrix h = gen_channel(3, 3, rng);
  PrecoderConfig ci{PrecoderMode::ChannelInverse, h, {}, 1.0};
  RVector lam = dvq_decompose(h).d.cwiseInverse();
  PrecoderConfig ra{PrecoderMode::RateAllocated, h, lam, 1.0};
  EseEstimate e1 = estimate_ese(ci, 3000, 7);
  EseEstimate e2 = estimate_ese(ra, 3000, 8);
  double tol = 3.0 * std::sqrt(e1.std_error * e1.std_error + e2.std_error * e2.std_error);
  CHECK(std::abs(e1.mean - e2.mean) <= tol);
}

TEST_CASE("demodulate basics") {
  CHECK(demodulate(cplx(0, 0), 1.0, 0.2, 10.0) == cplx(0, 0));
  CHECK_THROWS_AS(demodulate(cplx(1, 0), 0.0, 0.2, 10.0), DomainError);
}

TEST_CASE("noiseless end-to-end chain recovers the data in both modes") {
  Rng rng(38, 0);
  for (int t = 0; t < 500; ++t) {
    int k = 1 + static_cast<int>(rng.next_u64() % 3);
    CMatrix h = gen_channel(k, k + 1, rng);
    CVector a = random_cube_point(k, rng);
    const double p = 5.0, ese = 0.3;

    PrecoderConfig ci{PrecoderMode::ChannelInverse, h, {}, p};
    CVector y = h * encode(ci, a, ese);
    for (int u = 0; u < k; ++u) {
      cplx ahat = demodulate(y(u), 1.0, ese, p);
      CHECK(std::abs(ahat - a(u)) < 1e-8);
    }

    RVector lambda = RVector::Ones(k) / std::sqrt(static_cast<double>(k));
    PrecoderConfig ra{PrecoderMode::RateAllocated, h, lambda, p};
    RVector gains = effective_gains(ra);
    CVector y2 = h * encode(ra, a, ese);
    for (int u = 0; u < k; ++u) {
      cplx ahat = demodulate(y2(u), gains(u), ese, p);
      CHECK(std::abs(ahat - a(u)) < 1e-8);
    }
  }
}

TEST_CASE("symbol errors are rare at very high SNR") {
  Rng rng(39, 0);
  CMatrix h = gen_channel(2, 2, rng);
  const double p = 1e6;
  PrecoderConfig cfg{PrecoderMode::ChannelInverse, h, {}, p};
  double ese = estimate_ese(cfg, 2000, 3).mean;
  int errors = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    Rng draw(55, static_cast<std::uint64_t>(i));
    CVector a = random_cube_point(2, draw);
    CVector y = h * encode(cfg, a, ese);
    for (int u = 0; u < 2; ++u) {
      cplx noise = draw.cgauss();
      cplx ahat = demodulate(y(u) + noise, 1.0, ese, p);
      // distance on the torus: a benign wrap at the cell edge is not an error
      cplx diff = modulo_cube(ahat - a(u));
      // effective noise std is sqrt(ese/P) ~ 1e-3; 0.05 is > 40 sigma
      if (std::abs(diff) > 0.05) ++errors;
    }
  }
  CHECK(static_cast<double>(errors) / (2 * n) < 1e-3);
}
