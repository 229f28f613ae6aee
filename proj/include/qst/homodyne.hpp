// Homodyne quadrature data for squeezed thermal states and reconstruction of
// observables from it with pattern-function estimators.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qst/cv_core.hpp"
#include "qst/random.hpp"

namespace qst {

enum class PhaseSchedule { LinearRamp, UniformRandom };

struct HomodyneMeta {
  StsParams params;
  PhaseSchedule schedule{PhaseSchedule::LinearRamp};
  std::optional<std::uint64_t> seed;
};

// Ordered (phase, outcome) samples plus the generation metadata.
struct HomodyneDataset {
  std::vector<double> theta;
  std::vector<double> x;
  HomodyneMeta meta;

  std::size_t size() const { return theta.size(); }
};

// Quadrature variance at local-oscillator phase theta,
// V(theta) = (s cos^2 + sin^2 / s) / mu.
double quadrature_variance(const StsParams& p, double theta);

// Outcomes x_k ~ Normal(0, V(theta_k)). The default schedule is the
// deterministic ramp theta_k = 2 pi k / m; the random schedule draws each
// phase uniformly from [0, 2 pi).
HomodyneDataset simulate_homodyne(const StsParams& p, std::size_t m,
                                  PhaseSchedule schedule, Rng& rng);
HomodyneDataset simulate_homodyne(const StsParams& p, std::size_t m,
                                  PhaseSchedule schedule, std::uint64_t seed);

// Pattern-function kernels whose sample mean estimates the observable.
inline double estimator_quadrature(double x, double theta, double phi) {
  return 2.0 * x * std::cos(theta - phi);
}
inline double estimator_quadrature_sq(double x, double theta, double phi) {
  return (x * x - 1.0) * (1.0 + 2.0 * std::cos(2.0 * (theta - phi))) + 1.0;
}
inline double estimator_photon_number(double x) { return 0.5 * (x * x - 1.0); }

enum class Observable { Quadrature, QuadratureSq, PhotonNumber };

struct ReconstructedMoment {
  double value{0};
  double sigma{0};  // standard error of the sample mean
};

// Sample mean of the estimator over the dataset; single pass accumulating
// sum f and sum f^2.
ReconstructedMoment reconstruct(const HomodyneDataset& ds, Observable which,
                                double phi = 0.0);

// <x_phi^2> - <x_phi>^2 with the two moment errors combined in quadrature.
ReconstructedMoment reconstruct_variance(const HomodyneDataset& ds, double phi);

struct CmReconstruction {
  CovarianceMatrix2 cm;
  double sigma_var_x{0};
  double sigma_var_p{0};
  double sigma_cov_xp{0};
  double mean_x{0};
  double mean_p{0};
  double sigma_mean_x{0};
  double sigma_mean_p{0};
  double mean_outcome{0};  // phase-averaged raw mean; detects DC offsets that
  double sigma_mean_outcome{0};  // cancel out of the quadrature estimators
  ReconstructedMoment photon_number;
  bool first_moments_compatible{false};  // quadrature means and raw mean null
  bool diagonal_compatible{false};       // |cov_xp| < 3 sigma
};

// First and second moments at phi in {0, pi/4, pi/2}; the pi/4 variance
// fixes the cross term. Compatibility with the zero-mean diagonal form is
// reported at the 3-sigma level.
CmReconstruction reconstruct_cm(const HomodyneDataset& ds);

struct VarianceFitPoint {
  double n_tot{0};
  double var_x{0};
  double sigma_var_x{1};
  double var_p{0};
  double sigma_var_p{1};
};

struct VarianceFitResult {
  double n_s{0};
  double db{0};
  double chi2{0};
  std::vector<double> residuals;  // (x, p) residuals in units of sigma, per point
};

// Weighted least squares of both variance branches against their common
// energy parametrization; the single shared parameter is n_s.
VarianceFitResult fit_squeezed_photons(std::span<const VarianceFitPoint> points);

struct PhaseBinnedVariance {
  double theta_center{0};
  double variance{0};
  double sigma{0};
  std::size_t count{0};
};

// Diagnostic: sample variances in phase bins centered on k*pi/n_bins, with
// the phase folded into [0, pi) (x sign-flipped on the second half turn).
std::vector<PhaseBinnedVariance> binned_variances(const HomodyneDataset& ds,
                                                  int n_bins = 20);

}  // namespace qst
