// Single-mode squeezed thermal states: parametrizations, energy bookkeeping,
// the nonclassicality test and Gaussian fidelity/distance measures.
//
// Conventions: quadrature variances are in shot-noise units (vacuum = 1),
// first moments are zero, and a squeezed thermal state has the diagonal
// covariance matrix diag(s/mu, 1/(mu*s)) with squeezing factor s = exp(2r)
// and purity mu = Tr[rho^2].
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "qst/random.hpp"

namespace qst {

// det(sigma) >= 1 - kPhysicalityTol is accepted as physical; harder
// violations of the uncertainty relation are rejected.
inline constexpr double kPhysicalityTol = 1e-9;

// Squeezing factor s = exp(2r) and purity mu of a squeezed thermal state.
template <typename Scalar>
struct StsParamsT {
  Scalar s{1};
  Scalar mu{1};

  Scalar squeeze_parameter() const { return std::log(s) / Scalar(2); }  // r
  Scalar thermal_photons() const { return (Scalar(1) / mu - Scalar(1)) / Scalar(2); }
  Scalar squeeze_photons() const {
    const Scalar sh = std::sinh(squeeze_parameter());
    return sh * sh;
  }
  Scalar total_photons() const;

  bool valid() const {
    return s > Scalar(0) && mu > Scalar(0) && mu <= Scalar(1) + Scalar(1e-12);
  }
};

using StsParams = StsParamsT<double>;

template <typename Scalar>
void require_valid(const StsParamsT<Scalar>& p) {
  if (!p.valid())
    throw std::invalid_argument("StsParams: need s > 0 and 0 < mu <= 1");
}

// Second moments of one mode, shot-noise units. Plain data; physicality is
// enforced by the operations that require it.
template <typename Scalar>
struct CovarianceMatrix2T {
  Scalar var_x{1};
  Scalar var_p{1};
  Scalar cov_xp{0};

  Scalar det() const { return var_x * var_p - cov_xp * cov_xp; }

  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << var_x, cov_xp, cov_xp, var_p;
    return m;
  }
};

using CovarianceMatrix2 = CovarianceMatrix2T<double>;

template <typename Scalar>
bool is_physical(const CovarianceMatrix2T<Scalar>& c) {
  return c.var_x > Scalar(0) && c.var_p > Scalar(0) &&
         c.det() >= Scalar(1) - Scalar(kPhysicalityTol);
}

template <typename Scalar>
void require_physical(const CovarianceMatrix2T<Scalar>& c) {
  if (!is_physical(c))
    throw std::domain_error(
        "covariance matrix is unphysical: needs var_x, var_p > 0 and det >= 1");
}

template <typename Scalar>
struct EnergyBudgetT {
  Scalar thermal_photons{0};
  Scalar squeeze_photons{0};
  Scalar total_photons{0};
};

using EnergyBudget = EnergyBudgetT<double>;

// N_tot = n_th + n_s + 2 n_th n_s.
template <typename Scalar>
Scalar total_energy(Scalar thermal_photons, Scalar squeeze_photons) {
  if (!(thermal_photons >= Scalar(0)) || !(squeeze_photons >= Scalar(0)))
    throw std::invalid_argument("total_energy: photon numbers must be >= 0");
  return thermal_photons + squeeze_photons +
         Scalar(2) * thermal_photons * squeeze_photons;
}

template <typename Scalar>
Scalar StsParamsT<Scalar>::total_photons() const {
  return total_energy(thermal_photons(), squeeze_photons());
}

template <typename Scalar>
EnergyBudgetT<Scalar> energy_budget(const StsParamsT<Scalar>& p) {
  require_valid(p);
  return {p.thermal_photons(), p.squeeze_photons(), p.total_photons()};
}

// sigma = diag(s/mu, 1/(mu*s)).
template <typename Scalar>
CovarianceMatrix2T<Scalar> cm_from_params(const StsParamsT<Scalar>& p) {
  require_valid(p);
  return {p.s / p.mu, Scalar(1) / (p.mu * p.s), Scalar(0)};
}

// Inverse of cm_from_params: s = sqrt(vx/vp), mu = 1/sqrt(vx*vp). The cross
// term must vanish (squeezed-thermal form) within `cov_tol`.
template <typename Scalar>
StsParamsT<Scalar> params_from_cm(const CovarianceMatrix2T<Scalar>& c,
                                  Scalar cov_tol = Scalar(1e-9)) {
  if (!(c.var_x > Scalar(0)) || !(c.var_p > Scalar(0)))
    throw std::invalid_argument("params_from_cm: variances must be positive");
  if (std::abs(c.cov_xp) > cov_tol)
    throw std::domain_error(
        "params_from_cm: nonzero cross term, not in squeezed-thermal form");
  const Scalar det = c.var_x * c.var_p;
  if (det < Scalar(1) - Scalar(kPhysicalityTol))
    throw std::domain_error("params_from_cm: unphysical state, det(sigma) < 1");
  return {std::sqrt(c.var_x / c.var_p), Scalar(1) / std::sqrt(det)};
}

// Variances as a function of (N_tot, n_s); linear in N_tot for fixed n_s.
// The squeezed direction is x (s <= 1 branch).
template <typename Scalar>
std::pair<Scalar, Scalar> variances_from_energy(Scalar total_photons,
                                                Scalar squeeze_photons) {
  if (!(squeeze_photons >= Scalar(0)) || !(total_photons >= squeeze_photons))
    throw std::invalid_argument(
        "variances_from_energy: need n_tot >= n_s >= 0");
  const Scalar thermal = Scalar(1) + Scalar(2) * (total_photons - squeeze_photons) /
                                         (Scalar(2) * squeeze_photons + Scalar(1));
  const Scalar squeezed = Scalar(1) + Scalar(2) * squeeze_photons -
                          Scalar(2) * std::sqrt(squeeze_photons +
                                                squeeze_photons * squeeze_photons);
  return {thermal * squeezed, thermal / squeezed};
}

// Squeezing factor (s <= 1 branch) equivalent to a number of squeeze photons.
template <typename Scalar>
Scalar squeeze_factor_from_photons(Scalar squeeze_photons) {
  if (!(squeeze_photons >= Scalar(0)))
    throw std::invalid_argument("squeeze_factor_from_photons: need n_s >= 0");
  return Scalar(1) + Scalar(2) * squeeze_photons -
         Scalar(2) * std::sqrt(squeeze_photons + squeeze_photons * squeeze_photons);
}

// Singular Glauber P-function iff s < mu or s > 1/mu.
template <typename Scalar>
bool is_nonclassical(const StsParamsT<Scalar>& p) {
  require_valid(p);
  return p.s < p.mu || p.s > Scalar(1) / p.mu;
}

// Fidelity of two zero-mean single-mode Gaussian states,
//   F = 1 / (sqrt(Delta + delta) - sqrt(delta)),
// Delta = det(sigma1 + sigma2)/4, delta = (det sigma1 - 1)(det sigma2 - 1)/4.
template <typename Scalar>
Scalar gaussian_fidelity(const CovarianceMatrix2T<Scalar>& c1,
                         const CovarianceMatrix2T<Scalar>& c2) {
  require_physical(c1);
  require_physical(c2);
  const Eigen::Matrix<Scalar, 2, 2> sum = c1.matrix() + c2.matrix();
  const Scalar big = sum.determinant() / Scalar(4);
  const Scalar small =
      std::max(Scalar(0), (c1.det() - Scalar(1)) * (c2.det() - Scalar(1)) / Scalar(4));
  const Scalar denom = std::sqrt(big + small) - std::sqrt(small);
  const Scalar f = Scalar(1) / denom;
  return std::min(f, Scalar(1));
}

// D_B = sqrt(2 (1 - sqrt(F))).
template <typename Scalar>
Scalar bures_distance(Scalar fidelity) {
  if (!(fidelity >= Scalar(0) && fidelity <= Scalar(1)))
    throw std::domain_error("bures_distance: fidelity must be in [0, 1]");
  return std::sqrt(Scalar(2) * (Scalar(1) - std::sqrt(fidelity)));
}

// 1 - sqrt(F) <= T <= sqrt(1 - F) for the trace distance T.
template <typename Scalar>
std::pair<Scalar, Scalar> trace_distance_bounds(Scalar fidelity) {
  if (!(fidelity >= Scalar(0) && fidelity <= Scalar(1)))
    throw std::domain_error("trace_distance_bounds: fidelity must be in [0, 1]");
  return {Scalar(1) - std::sqrt(fidelity), std::sqrt(Scalar(1) - fidelity)};
}

// Squeezing in decibels, -10 log10(s); positive for squeezing below shot noise.
template <typename Scalar>
Scalar squeezing_db(Scalar s) {
  if (!(s > Scalar(0))) throw std::invalid_argument("squeezing_db: need s > 0");
  return Scalar(-10) * std::log10(s);
}

// Coherent amplitude of one component of a thermal mixture: |alpha| has
// density 2a/n_th exp(-a^2/n_th) and the phase is uniform, so that the
// mean of |alpha|^2 equals n_th.
inline std::complex<double> sample_thermal_amplitude(double thermal_photons,
                                                     Rng& rng) {
  if (!(thermal_photons > 0.0))
    throw std::invalid_argument("sample_thermal_amplitude: need n_th > 0");
  const double mag = std::sqrt(-thermal_photons * std::log(uniform01_pos(rng)));
  const double phase = uniform_range(rng, 0.0, 2.0 * std::numbers::pi);
  return std::polar(mag, phase);
}

}  // namespace qst
