#include "qst/homodyne.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "qst/optim.hpp"

namespace qst {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_coverage(const HomodyneDataset& ds) {
  if (ds.size() < 2)
    throw std::invalid_argument("homodyne dataset needs at least 2 samples");
  const auto [lo, hi] = std::minmax_element(ds.theta.begin(), ds.theta.end());
  if (*hi - *lo < 1e-9)
    throw std::runtime_error(
        "degenerate phase coverage: all phases are equal");
}

double evaluate_estimator(Observable which, double x, double theta, double phi) {
  switch (which) {
    case Observable::Quadrature:    return estimator_quadrature(x, theta, phi);
    case Observable::QuadratureSq:  return estimator_quadrature_sq(x, theta, phi);
    case Observable::PhotonNumber:  return estimator_photon_number(x);
  }
  throw std::invalid_argument("unknown observable");
}

}  // namespace

double quadrature_variance(const StsParams& p, double theta) {
  require_valid(p);
  const double c = std::cos(theta), s = std::sin(theta);
  return (p.s * c * c + s * s / p.s) / p.mu;
}

HomodyneDataset simulate_homodyne(const StsParams& p, std::size_t m,
                                  PhaseSchedule schedule, Rng& rng) {
  require_valid(p);
  if (m < 2)
    throw std::invalid_argument("simulate_homodyne: need at least 2 samples");
  HomodyneDataset ds;
  ds.meta.params = p;
  ds.meta.schedule = schedule;
  ds.theta.reserve(m);
  ds.x.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = (schedule == PhaseSchedule::LinearRamp)
                             ? kTwoPi * static_cast<double>(k) / static_cast<double>(m)
                             : uniform_range(rng, 0.0, kTwoPi);
    ds.theta.push_back(theta);
    ds.x.push_back(gaussian(rng) * std::sqrt(quadrature_variance(p, theta)));
  }
  return ds;
}

HomodyneDataset simulate_homodyne(const StsParams& p, std::size_t m,
                                  PhaseSchedule schedule, std::uint64_t seed) {
  Rng rng(seed);
  HomodyneDataset ds = simulate_homodyne(p, m, schedule, rng);
  ds.meta.seed = seed;
  return ds;
}

ReconstructedMoment reconstruct(const HomodyneDataset& ds, Observable which,
                                double phi) {
  require_coverage(ds);
  const double m = static_cast<double>(ds.size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double f = evaluate_estimator(which, ds.x[k], ds.theta[k], phi);
    sum += f;
    sum_sq += f * f;
  }
  const double mean = sum / m;
  const double spread = std::max(0.0, sum_sq / m - mean * mean);
  return {mean, std::sqrt(spread / m)};
}

ReconstructedMoment reconstruct_variance(const HomodyneDataset& ds, double phi) {
  const ReconstructedMoment first = reconstruct(ds, Observable::Quadrature, phi);
  const ReconstructedMoment second = reconstruct(ds, Observable::QuadratureSq, phi);
  const double value = second.value - first.value * first.value;
  const double sigma_sq_mean = 2.0 * first.value * first.sigma;
  return {value, std::hypot(second.sigma, sigma_sq_mean)};
}

CmReconstruction reconstruct_cm(const HomodyneDataset& ds) {
  constexpr double kQuarter = std::numbers::pi / 4.0;
  constexpr double kHalf = std::numbers::pi / 2.0;

  CmReconstruction out;
  const ReconstructedMoment mean_x = reconstruct(ds, Observable::Quadrature, 0.0);
  const ReconstructedMoment mean_p = reconstruct(ds, Observable::Quadrature, kHalf);
  const ReconstructedMoment var_x = reconstruct_variance(ds, 0.0);
  const ReconstructedMoment var_p = reconstruct_variance(ds, kHalf);
  const ReconstructedMoment var_diag = reconstruct_variance(ds, kQuarter);

  out.cm.var_x = var_x.value;
  out.cm.var_p = var_p.value;
  // Var(x_{pi/4}) = (Var x + Var p)/2 + Cov(x, p)
  out.cm.cov_xp = var_diag.value - 0.5 * (var_x.value + var_p.value);
  out.sigma_var_x = var_x.sigma;
  out.sigma_var_p = var_p.sigma;
  out.sigma_cov_xp = std::sqrt(var_diag.sigma * var_diag.sigma +
                               0.25 * var_x.sigma * var_x.sigma +
                               0.25 * var_p.sigma * var_p.sigma);
  out.mean_x = mean_x.value;
  out.mean_p = mean_p.value;
  out.sigma_mean_x = mean_x.sigma;
  out.sigma_mean_p = mean_p.sigma;

  double sum = 0.0, sum_sq = 0.0;
  for (double x : ds.x) {
    sum += x;
    sum_sq += x * x;
  }
  const double m = static_cast<double>(ds.size());
  out.mean_outcome = sum / m;
  out.sigma_mean_outcome = std::sqrt(
      std::max(0.0, sum_sq / m - out.mean_outcome * out.mean_outcome) / m);

  out.photon_number = reconstruct(ds, Observable::PhotonNumber);
  out.first_moments_compatible =
      std::abs(mean_x.value) < 3.0 * mean_x.sigma &&
      std::abs(mean_p.value) < 3.0 * mean_p.sigma &&
      std::abs(out.mean_outcome) < 3.0 * out.sigma_mean_outcome;
  out.diagonal_compatible = std::abs(out.cm.cov_xp) < 3.0 * out.sigma_cov_xp;
  return out;
}

VarianceFitResult fit_squeezed_photons(std::span<const VarianceFitPoint> points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_squeezed_photons: need at least 2 points");
  double n_s_max = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    if (!(pt.n_tot >= 0) || !(pt.sigma_var_x > 0) || !(pt.sigma_var_p > 0) ||
        !std::isfinite(pt.var_x) || !std::isfinite(pt.var_p))
      throw std::invalid_argument("fit_squeezed_photons: bad input point");
    n_s_max = std::min(n_s_max, pt.n_tot);
  }
  auto chi2 = [&](double n_s) {
    double total = 0.0;
    for (const auto& pt : points) {
      const auto [mx, mp] = variances_from_energy(pt.n_tot, n_s);
      const double rx = (pt.var_x - mx) / pt.sigma_var_x;
      const double rp = (pt.var_p - mp) / pt.sigma_var_p;
      total += rx * rx + rp * rp;
    }
    return total;
  };

  VarianceFitResult out;
  // n_s cannot exceed the smallest total energy in the data
  out.n_s = (n_s_max <= 0.0)
                ? 0.0
                : optim::scan_then_golden_min(chi2, 0.0, n_s_max, 256, 1e-10);
  out.chi2 = chi2(out.n_s);
  if (!std::isfinite(out.chi2))
    throw std::runtime_error("fit_squeezed_photons: fit did not converge");
  out.db = squeezing_db(squeeze_factor_from_photons(out.n_s));
  out.residuals.reserve(2 * points.size());
  for (const auto& pt : points) {
    const auto [mx, mp] = variances_from_energy(pt.n_tot, out.n_s);
    out.residuals.push_back((pt.var_x - mx) / pt.sigma_var_x);
    out.residuals.push_back((pt.var_p - mp) / pt.sigma_var_p);
  }
  return out;
}

std::vector<PhaseBinnedVariance> binned_variances(const HomodyneDataset& ds,
                                                  int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("binned_variances: n_bins >= 1");
  require_coverage(ds);
  struct Accum {
    double sum = 0, sum2 = 0, sum4 = 0;
    std::size_t n = 0;
  };
  std::vector<Accum> acc(n_bins);
  const double width = std::numbers::pi / n_bins;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    double t = std::fmod(ds.theta[k], kTwoPi);
    if (t < 0) t += kTwoPi;
    double x = ds.x[k];
    if (t >= std::numbers::pi) {  // x_{theta+pi} ~ -x_theta
      t -= std::numbers::pi;
      x = -x;
    }
    const int bin =
        static_cast<int>(std::floor((t + 0.5 * width) / width)) % n_bins;
    auto& a = acc[bin];
    a.sum += x;
    a.sum2 += x * x;
    a.sum4 += x * x * x * x;
    ++a.n;
  }
  std::vector<PhaseBinnedVariance> out;
  out.reserve(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    const auto& a = acc[b];
    PhaseBinnedVariance pb;
    pb.theta_center = b * width;
    pb.count = a.n;
    if (a.n >= 2) {
      const double m1 = a.sum / a.n, m2 = a.sum2 / a.n, m4 = a.sum4 / a.n;
      pb.variance = m2 - m1 * m1;
      pb.sigma = std::sqrt(std::max(0.0, m4 - m2 * m2) / a.n);
    }
    out.push_back(pb);
  }
  return out;
}

}  // namespace qst
