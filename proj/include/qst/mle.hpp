// 16-projector coincidence tomography of two-qubit states and
// maximum-likelihood reconstruction over the Choleski parametrization
// rho(T) = T^dag T / Tr[T^dag T].
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "qst/dv_core.hpp"
#include "qst/random.hpp"

namespace qst {

struct ProjectorSet {
  std::array<Eigen::Vector4cd, 16> kets;
  std::array<std::string, 16> labels;
  std::string id;
  double gram_condition{0};  // condition number of the 16x16 Gram matrix
};

// Canonical 16-setting polarization set over {H, V, D, L, R} pairs:
// HH HV VV VH RH RV DV DH DR DD RD HD VD VL HL RL. Tomographically complete.
const ProjectorSet& standard_projector_set();

struct AcquisitionMeta {
  double window_seconds{1.0};
  int repetitions{30};
};

struct CountRecord {
  std::array<double, 16> counts{};
  AcquisitionMeta acquisition;

  // Normalization constant: the first four projectors (HH HV VV VH) resolve
  // the identity, so their counts sum to the per-setting exposure.
  double normalization() const {
    return counts[0] + counts[1] + counts[2] + counts[3];
  }
};

enum class CountNoise { Poisson, None };

// Expected count n_scale * <psi_j| rho |psi_j> per projector, optionally
// with Poisson shot noise.
CountRecord simulate_counts(const DensityMatrix4& rho, double n_scale,
                            Rng& rng, CountNoise noise = CountNoise::Poisson);

// 16 real parameters of a complex lower-triangular T: four diagonal entries
// first, then (re, im) pairs of the strict lower triangle in row-major order
// (1,0) (2,0) (2,1) (3,0) (3,1) (3,2).
struct CholeskiParams {
  std::array<double, 16> t{};
};

// rho = T^dag T / Tr[T^dag T]; Hermitian, positive and unit-trace for any
// parameter values except all-zero.
DensityMatrix4 rho_from_choleski(const CholeskiParams& params);

// Inverse map (lower-triangular factorization of rho); used for seeding.
CholeskiParams choleski_from_rho(const DensityMatrix4& rho);

// Sum over projectors of (N q_j - n_j)^2 / (2 N q_j) with
// q_j = <psi_j| rho(T) |psi_j>, N the normalization constant. Predicted
// probabilities are floored at 1e-12 to keep the denominators finite.
double likelihood(const CholeskiParams& params, const CountRecord& counts,
                  const ProjectorSet& projectors);
Eigen::Matrix<double, 16, 1> likelihood_gradient(const CholeskiParams& params,
                                                 const CountRecord& counts,
                                                 const ProjectorSet& projectors);

// Physical state closest (in the least-squares sense of eigenvalue clamping)
// to the linear-inversion estimate of the counts.
DensityMatrix4 linear_inversion_estimate(const CountRecord& counts,
                                         const ProjectorSet& projectors);

struct MleOptions {
  int restarts{4};           // fallback random restarts after the seeded start
  int max_iterations{600};
  double gradient_tol{1e-9};
  std::uint64_t seed{0x6d6c65};  // seeds the random restarts
};

struct MleDiagnostics {
  double final_likelihood{0};
  int iterations{0};
  int restarts_used{0};
  bool converged{false};
};

struct MleResult {
  DensityMatrix4 rho;
  CholeskiParams params;
  MleDiagnostics diagnostics;
};

// BFGS minimization of the likelihood with an analytic gradient. The first
// start is the physical projection of the linear-inversion estimate (or
// `init` when given); random restarts follow only if a start fails.
MleResult mle_fit(const CountRecord& counts, const ProjectorSet& projectors,
                  std::optional<CholeskiParams> init = std::nullopt,
                  const MleOptions& options = {});

}  // namespace qst
