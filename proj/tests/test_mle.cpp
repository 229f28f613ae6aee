#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qst/mle.hpp"
#include "qst/random.hpp"

using namespace qst;

namespace {

CountRecord noiseless_counts(const DensityMatrix4& rho, double n_scale) {
  Rng rng(0);
  return simulate_counts(rho, n_scale, rng, CountNoise::None);
}

CholeskiParams random_choleski(Rng& rng) {
  CholeskiParams p;
  for (double& t : p.t) t = gaussian(rng);
  return p;
}

}  // namespace

TEST_CASE("standard projector set") {
  const ProjectorSet& ps = standard_projector_set();
  for (int j = 0; j < 16; ++j) {
    CHECK(ps.kets[j].norm() == doctest::Approx(1.0).epsilon(1e-12));
    const DensityMatrix4 proj = ps.kets[j] * ps.kets[j].adjoint();
    CHECK((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(proj.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(ps.labels[0] == "HH");
  CHECK(ps.labels[3] == "VH");
  // tomographic completeness: nonsingular Gram matrix, finite conditioning
  CHECK(ps.gram_condition > 1.0);
  CHECK(ps.gram_condition < 1e3);

  // projections of the singlet: zero in HH, half in HV
  const DensityMatrix4 singlet = werner(1.0);
  const double on_hh =
      (ps.kets[0].adjoint() * singlet * ps.kets[0])(0).real();
  const double on_hv =
      (ps.kets[1].adjoint() * singlet * ps.kets[1])(0).real();
  CHECK(on_hh == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(on_hv == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("count simulation") {
  Rng rng(1);
  const CountRecord mixed = simulate_counts(DensityMatrix4::Identity() / 4.0,
                                            1000.0, rng, CountNoise::None);
  for (double n : mixed.counts) CHECK(n == doctest::Approx(250.0).epsilon(1e-10));
  CHECK(mixed.normalization() == doctest::Approx(1000.0).epsilon(1e-10));

  const CountRecord singlet =
      simulate_counts(werner(1.0), 1000.0, rng, CountNoise::None);
  CHECK(singlet.counts[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(singlet.counts[1] == doctest::Approx(500.0).epsilon(1e-10));

  // fixed seed reproducibility
  Rng r1(9), r2(9);
  const CountRecord a = simulate_counts(werner(0.44), 500.0, r1);
  const CountRecord b = simulate_counts(werner(0.44), 500.0, r2);
  CHECK(a.counts == b.counts);

  // Poisson sample mean approaches the expected count
  const DensityMatrix4 rho = werner(0.44);
  const CountRecord expected = noiseless_counts(rho, 200.0);
  Rng rng2(33);
  std::array<double, 16> sums{};
  const int repeats = 1000;
  for (int i = 0; i < repeats; ++i) {
    const CountRecord draw = simulate_counts(rho, 200.0, rng2);
    for (int j = 0; j < 16; ++j) sums[j] += draw.counts[j];
  }
  for (int j = 0; j < 16; ++j) {
    const double mean = sums[j] / repeats;
    const double se = std::sqrt(expected.counts[j] / repeats);
    CHECK(std::abs(mean - expected.counts[j]) < 3.0 * se + 1e-9);
  }

  CHECK_THROWS_AS(simulate_counts(rho, 0.0, rng), std::invalid_argument);
}

TEST_CASE("choleski parametrization") {
  CholeskiParams identity;
  identity.t = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK((rho_from_choleski(identity) - DensityMatrix4::Identity() / 4.0)
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  CholeskiParams hh;
  hh.t = {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  DensityMatrix4 expected = DensityMatrix4::Zero();
  expected(0, 0) = 1.0;
  CHECK((rho_from_choleski(hh) - expected).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix4 rho = rho_from_choleski(random_choleski(rng));
    CHECK(is_valid_density_matrix(rho));
  }

  CHECK_THROWS_AS(rho_from_choleski(CholeskiParams{}), std::invalid_argument);

  // round trip through the factorization
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix4 rho = rho_from_choleski(random_choleski(rng));
    const DensityMatrix4 back = rho_from_choleski(choleski_from_rho(rho));
    CHECK((back - rho).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("likelihood") {
  const ProjectorSet& ps = standard_projector_set();
  Rng rng(5);

  // perfect-fit counts give exactly zero
  const CholeskiParams truth = random_choleski(rng);
  const CountRecord perfect =
      noiseless_counts(rho_from_choleski(truth), 1234.0);
  CHECK(likelihood(truth, perfect, ps) < 1e-18);

  // nonnegative for arbitrary parameter/count pairs
  for (int i = 0; i < 20; ++i) {
    CountRecord counts;
    for (double& n : counts.counts) n = uniform_range(rng, 0.0, 300.0);
    if (!(counts.normalization() > 0)) counts.counts[0] = 1.0;
    CHECK(likelihood(random_choleski(rng), counts, ps) >= 0.0);
  }

  // second-order response to a single-count perturbation
  const CountRecord base = noiseless_counts(rho_from_choleski(truth), 5000.0);
  const double q7 = base.counts[7] / base.normalization();
  for (double delta : {0.5, 1.0, 2.0}) {
    CountRecord bumped = base;
    bumped.counts[7] += delta;
    const double expected =
        delta * delta / (2.0 * base.normalization() * q7);
    CHECK(likelihood(truth, bumped, ps) ==
          doctest::Approx(expected).epsilon(5e-3));
  }
}

TEST_CASE("likelihood gradient matches central differences") {
  const ProjectorSet& ps = standard_projector_set();
  Rng rng(7);
  CountRecord counts;
  for (double& n : counts.counts) n = uniform_range(rng, 50.0, 400.0);

  for (int trial = 0; trial < 20; ++trial) {
    const CholeskiParams p = random_choleski(rng);
    const auto grad = likelihood_gradient(p, counts, ps);
    for (int i = 0; i < 16; ++i) {
      const double h = 1e-6;
      CholeskiParams lo = p, hi = p;
      lo.t[i] -= h;
      hi.t[i] += h;
      const double numeric =
          (likelihood(hi, counts, ps) - likelihood(lo, counts, ps)) / (2 * h);
      CHECK(grad(i) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("linear inversion seed") {
  const DensityMatrix4 rho = werner(0.44);
  const CountRecord counts = noiseless_counts(rho, 10000.0);
  const DensityMatrix4 estimate =
      linear_inversion_estimate(counts, standard_projector_set());
  CHECK(is_valid_density_matrix(estimate, 1e-8));
  CHECK((estimate - rho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("noiseless fits recover the state") {
  const ProjectorSet& ps = standard_projector_set();
  // full-rank targets reach an exactly-zero objective
  for (const DensityMatrix4& truth : {werner(0.44), werner(0.0)}) {
    const CountRecord counts = noiseless_counts(truth, 10000.0);
    const MleResult fit = mle_fit(counts, ps);
    CHECK(fit.diagnostics.converged);
    CHECK(fit.diagnostics.final_likelihood < 1e-8);
    CHECK(uhlmann_fidelity(fit.rho, truth) >= 0.9999);
    CHECK(is_valid_density_matrix(fit.rho));
  }
  // a pure target leaves the floored zero-probability terms (N * 1e-12 / 2
  // each) in the objective, so only near-zero is reachable there
  const DensityMatrix4 singlet = bell_state(Bell::PsiMinus);
  const MleResult fit = mle_fit(noiseless_counts(singlet, 10000.0), ps);
  CHECK(fit.diagnostics.converged);
  CHECK(fit.diagnostics.final_likelihood < 1e-7);
  CHECK(uhlmann_fidelity(fit.rho, singlet) >= 0.999);
}

TEST_CASE("fit is independent of the starting point") {
  const ProjectorSet& ps = standard_projector_set();
  const CountRecord counts = noiseless_counts(werner(0.44), 10000.0);
  Rng rng(11);
  std::vector<DensityMatrix4> results;
  for (int i = 0; i < 10; ++i)
    results.push_back(mle_fit(counts, ps, random_choleski(rng)).rho);
  for (std::size_t i = 1; i < results.size(); ++i)
    CHECK((results[i] - results[0]).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("fit quality improves with count statistics") {
  const ProjectorSet& ps = standard_projector_set();
  const DensityMatrix4 truth = werner(0.44);
  std::vector<double> medians;
  for (double n_scale : {100.0, 1000.0, 10000.0}) {
    std::vector<double> fidelities;
    for (int seed = 0; seed < 50; ++seed) {
      Rng rng(1000u + static_cast<std::uint64_t>(seed));
      const CountRecord counts = simulate_counts(truth, n_scale, rng);
      fidelities.push_back(uhlmann_fidelity(mle_fit(counts, ps).rho, truth));
    }
    std::nth_element(fidelities.begin(), fidelities.begin() + 25,
                     fidelities.end());
    medians.push_back(fidelities[25]);
  }
  CHECK(medians[0] <= medians[1]);
  CHECK(medians[1] <= medians[2]);
  CHECK(medians[2] > 0.99);
}

TEST_CASE("poisson-count fit lands near the preparation") {
  const ProjectorSet& ps = standard_projector_set();
  Rng rng(2024);
  const CountRecord counts = simulate_counts(werner(0.44), 1800.0, rng);
  const MleResult fit = mle_fit(counts, ps);
  const WernerFit closest = closest_werner(fit.rho);
  CHECK(std::abs(closest.p - 0.44) < 0.15);
  CHECK(closest.fidelity > 0.95);
}
