#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "fock_oracle.hpp"
#include "qst/cv_core.hpp"
#include "qst/random.hpp"

using namespace qst;

namespace {

StsParams random_params(Rng& rng) {
  // log-uniform squeezing in [0.1, 10], purity in (0.2, 1]
  const double s = std::exp(uniform_range(rng, std::log(0.1), std::log(10.0)));
  const double mu = uniform_range(rng, 0.2, 1.0);
  return {s, mu};
}

}  // namespace

TEST_CASE("cm_from_params reproduces the characterization values") {
  const CovarianceMatrix2 state7 = cm_from_params(StsParams{0.41, 0.53});
  CHECK(state7.var_x == doctest::Approx(0.774).epsilon(1e-3));
  CHECK(state7.var_p == doctest::Approx(4.602).epsilon(1e-3));
  CHECK(state7.cov_xp == 0.0);

  const CovarianceMatrix2 vacuum = cm_from_params(StsParams{1.0, 1.0});
  CHECK(vacuum.var_x == doctest::Approx(1.0));
  CHECK(vacuum.var_p == doctest::Approx(1.0));

  const CovarianceMatrix2 state1 = cm_from_params(StsParams{0.39, 0.81});
  CHECK(state1.var_x == doctest::Approx(0.481).epsilon(2e-3));
  CHECK(state1.var_p == doctest::Approx(3.165).epsilon(2e-3));

  CHECK_THROWS_AS(cm_from_params(StsParams{-0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(cm_from_params(StsParams{0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cm_from_params(StsParams{0.5, 1.5}), std::invalid_argument);
}

TEST_CASE("params_from_cm inverts the parametrization") {
  const StsParams p7 = params_from_cm(CovarianceMatrix2{0.774, 4.602, 0.0});
  CHECK(p7.s == doctest::Approx(0.41).epsilon(2e-3));
  CHECK(p7.mu == doctest::Approx(0.53).epsilon(2e-3));

  const StsParams vac = params_from_cm(CovarianceMatrix2{1.0, 1.0, 0.0});
  CHECK(vac.s == doctest::Approx(1.0));
  CHECK(vac.mu == doctest::Approx(1.0));

  const StsParams p14 = params_from_cm(CovarianceMatrix2{1.314, 6.211, 0.0});
  CHECK(p14.s == doctest::Approx(0.46).epsilon(2e-3));
  CHECK(p14.mu == doctest::Approx(0.35).epsilon(2e-3));

  CHECK_THROWS_AS(params_from_cm(CovarianceMatrix2{1.0, 1.0, 0.3}),
                  std::domain_error);
  CHECK_THROWS_AS(params_from_cm(CovarianceMatrix2{0.5, 0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(params_from_cm(CovarianceMatrix2{-1.0, 2.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("params <-> cm round trip is exact to 1e-12") {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const StsParams p = random_params(rng);
    const StsParams back = params_from_cm(cm_from_params(p));
    CHECK(back.s == doctest::Approx(p.s).epsilon(1e-12));
    CHECK(back.mu == doctest::Approx(p.mu).epsilon(1e-12));
  }
}

TEST_CASE("total energy") {
  CHECK(total_energy(0.0, 0.0) == 0.0);
  CHECK(total_energy(1.0, 0.0) == 1.0);
  // state-7 budget: n_th and n_s derived from (s, mu) = (0.41, 0.53)
  CHECK(total_energy(0.4434, 0.2122) == doctest::Approx(0.8437792).epsilon(1e-6));
  const EnergyBudget budget = energy_budget(StsParams{0.41, 0.53});
  CHECK(budget.thermal_photons == doctest::Approx(0.443396).epsilon(1e-5));
  CHECK(budget.squeeze_photons == doctest::Approx(0.212256).epsilon(1e-5));
  CHECK(budget.total_photons == doctest::Approx(0.84).epsilon(5e-3));
  CHECK_THROWS_AS(total_energy(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(total_energy(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("variances from energy") {
  const auto [vx, vp] = variances_from_energy(0.844, 0.2122);
  CHECK(vx == doctest::Approx(0.773801).epsilon(1e-5));
  CHECK(vp == doctest::Approx(4.602199).epsilon(1e-5));

  const auto [vx0, vp0] = variances_from_energy(0.0, 0.0);
  CHECK(vx0 == doctest::Approx(1.0));
  CHECK(vp0 == doctest::Approx(1.0));

  // pure squeezed states (n_tot = n_s) sit on the minimum-uncertainty curve
  for (double n_s : {0.05, 0.2, 0.7, 1.3}) {
    const auto [a, b] = variances_from_energy(n_s, n_s);
    CHECK(a * b == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(variances_from_energy(0.1, 0.2), std::invalid_argument);
}

TEST_CASE("variance product equals the inverse squared purity") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double n_s = uniform_range(rng, 0.0, 1.0);
    const double n_tot = n_s + uniform_range(rng, 0.0, 2.0);
    const auto [vx, vp] = variances_from_energy(n_tot, n_s);
    const double n_th = (n_tot - n_s) / (1.0 + 2.0 * n_s);
    const double inv_mu = 1.0 + 2.0 * n_th;
    CHECK(vx * vp == doctest::Approx(inv_mu * inv_mu).epsilon(1e-10));
  }
}

TEST_CASE("nonclassicality condition") {
  CHECK(is_nonclassical(StsParams{0.42, 0.44}));
  CHECK_FALSE(is_nonclassical(StsParams{1.0, 1.0}));
  CHECK_FALSE(is_nonclassical(StsParams{0.42, 0.38}));

  // invariant under s -> 1/s
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const StsParams p = random_params(rng);
    CHECK(is_nonclassical(p) == is_nonclassical(StsParams{1.0 / p.s, p.mu}));
  }
}

TEST_CASE("gaussian fidelity identities and frozen values") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const CovarianceMatrix2 c = cm_from_params(random_params(rng));
    CHECK(gaussian_fidelity(c, c) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // symmetry, range, and F = 1 only at identical matrices
  for (int i = 0; i < 50; ++i) {
    const CovarianceMatrix2 c1 = cm_from_params(random_params(rng));
    const CovarianceMatrix2 c2 = cm_from_params(random_params(rng));
    const double f12 = gaussian_fidelity(c1, c2);
    const double f21 = gaussian_fidelity(c2, c1);
    CHECK(f12 == doctest::Approx(f21).epsilon(1e-12));
    CHECK(f12 > 0.0);
    CHECK(f12 <= 1.0);
    if (std::abs(c1.var_x - c2.var_x) > 1e-6 ||
        std::abs(c1.var_p - c2.var_p) > 1e-6)
      CHECK(f12 < 1.0);
  }

  const CovarianceMatrix2 state1 = cm_from_params(StsParams{0.39, 0.81});
  const CovarianceMatrix2 state7 = cm_from_params(StsParams{0.41, 0.53});
  const CovarianceMatrix2 state14 = cm_from_params(StsParams{0.46, 0.35});
  CHECK(gaussian_fidelity(state1, state7) == doctest::Approx(0.920865).epsilon(1e-4));
  CHECK(gaussian_fidelity(state14, state7) == doctest::Approx(0.946006).epsilon(1e-4));

  CHECK_THROWS_AS(gaussian_fidelity(CovarianceMatrix2{0.5, 0.5, 0.0}, state7),
                  std::domain_error);
}

TEST_CASE("gaussian fidelity matches the Fock-basis computation") {
  // spot pair here; the full grid runs in the acceptance suite
  const double f_closed = gaussian_fidelity(cm_from_params(StsParams{0.4, 0.7}),
                                            cm_from_params(StsParams{0.7, 0.4}));
  const double f_fock = fock_oracle::uhlmann_fidelity(
      fock_oracle::sts_density_matrix(0.4, 0.7),
      fock_oracle::sts_density_matrix(0.7, 0.4));
  CHECK(f_closed == doctest::Approx(f_fock).epsilon(1e-4));
}

TEST_CASE("trace-distance bounds bracket the Fock-basis trace distance") {
  Rng rng(31);
  for (int i = 0; i < 10; ++i) {
    const double s1 = uniform_range(rng, 0.4, 2.0);
    const double mu1 = uniform_range(rng, 0.4, 1.0);
    const double s2 = uniform_range(rng, 0.4, 2.0);
    const double mu2 = uniform_range(rng, 0.4, 1.0);
    const double f = gaussian_fidelity(cm_from_params(StsParams{s1, mu1}),
                                       cm_from_params(StsParams{s2, mu2}));
    const auto [lower, upper] = trace_distance_bounds(f);
    const int cutoff =
        std::max(fock_oracle::cutoff_for(fock_oracle::total_photons(s1, mu1)),
                 fock_oracle::cutoff_for(fock_oracle::total_photons(s2, mu2)));
    const double dist = fock_oracle::trace_distance(
        fock_oracle::sts_density_matrix(s1, mu1, cutoff),
        fock_oracle::sts_density_matrix(s2, mu2, cutoff));
    CHECK(lower <= dist + 1e-6);
    CHECK(dist <= upper + 1e-6);
  }
}

TEST_CASE("bures distance") {
  CHECK(bures_distance(1.0) == 0.0);
  CHECK(bures_distance(0.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK(bures_distance(0.25) == doctest::Approx(1.0));
  CHECK_THROWS_AS(bures_distance(1.5), std::domain_error);
  CHECK_THROWS_AS(bures_distance(-0.1), std::domain_error);
  // monotone decreasing in the fidelity
  double prev = bures_distance(0.0);
  for (double f = 0.1; f < 1.05; f += 0.1) {
    const double d = bures_distance(std::min(f, 1.0));
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("trace distance bounds") {
  const auto [l1, u1] = trace_distance_bounds(1.0);
  CHECK(l1 == 0.0);
  CHECK(u1 == 0.0);
  const auto [l0, u0] = trace_distance_bounds(0.0);
  CHECK(l0 == 1.0);
  CHECK(u0 == 1.0);
  const auto [l, u] = trace_distance_bounds(0.81);
  CHECK(l == doctest::Approx(0.1));
  CHECK(u == doctest::Approx(0.4358899));
  CHECK(l <= u);
  CHECK_THROWS_AS(trace_distance_bounds(2.0), std::domain_error);
}

TEST_CASE("thermal amplitude sampler") {
  Rng rng(77);
  const double n_th = 0.44;
  const int n = 100000;
  double sum_sq = 0.0;
  std::array<int, 20> phase_bins{};
  for (int i = 0; i < n; ++i) {
    const std::complex<double> alpha = sample_thermal_amplitude(n_th, rng);
    sum_sq += std::norm(alpha);
    double phase = std::arg(alpha);
    if (phase < 0) phase += 2.0 * std::numbers::pi;
    const int bin = std::min<int>(
        19, static_cast<int>(phase / (2.0 * std::numbers::pi / 20)));
    ++phase_bins[static_cast<std::size_t>(bin)];
  }
  // |alpha|^2 is exponential with mean n_th, so its std is n_th as well
  const double mean_sq = sum_sq / n;
  const double se = n_th / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean_sq - n_th) < 3.0 * se);

  // uniform phase: chi-square over 20 bins against the 1% critical value
  double chi2 = 0.0;
  const double expected = n / 20.0;
  for (int count : phase_bins)
    chi2 += (count - expected) * (count - expected) / expected;
  CHECK(chi2 < 36.19);

  // amplitudes collapse onto the origin as n_th -> 0+
  double max_mag = 0.0;
  for (int i = 0; i < 1000; ++i)
    max_mag = std::max(max_mag, std::abs(sample_thermal_amplitude(1e-10, rng)));
  CHECK(max_mag < 1e-3);

  CHECK_THROWS_AS(sample_thermal_amplitude(0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_thermal_amplitude(-1.0, rng), std::invalid_argument);
}

TEST_CASE("squeezing in decibels") {
  CHECK(squeezing_db(1.0) == 0.0);
  CHECK(squeezing_db(0.1) == doctest::Approx(10.0));
  CHECK(squeezing_db(0.4202) == doctest::Approx(3.77).epsilon(1e-3));
  const double s = squeeze_factor_from_photons(0.2);
  CHECK(s == doctest::Approx(0.420204).epsilon(1e-5));
  CHECK(squeezing_db(s) == doctest::Approx(3.7654).epsilon(1e-4));
  CHECK_THROWS_AS(squeezing_db(0.0), std::invalid_argument);
}
