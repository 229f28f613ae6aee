#include "qst/dv_core.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <numbers>
#include <unsupported/Eigen/KroneckerProduct>

#include "qst/optim.hpp"

namespace qst {

namespace {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector3d;
using Eigen::Vector4cd;
using std::complex;

const std::array<Matrix2cd, 3>& pauli() {
  static const std::array<Matrix2cd, 3> sigma = [] {
    std::array<Matrix2cd, 3> s;
    s[0] << 0, 1, 1, 0;
    s[1] << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
    s[2] << 1, 0, 0, -1;
    return s;
  }();
  return sigma;
}

// Matrix square root of a Hermitian PSD matrix; eigenvalues slightly below
// zero (rounding) are clamped, anything below -tol is rejected.
Matrix4cd sqrt_psd(const Matrix4cd& m, double tol = kDensityMatrixTol) {
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m);
  Eigen::Vector4d w = es.eigenvalues();
  for (int i = 0; i < 4; ++i) {
    if (w(i) < -tol)
      throw std::domain_error("matrix square root: negative eigenvalue");
    w(i) = std::sqrt(std::max(0.0, w(i)));
  }
  return es.eigenvectors() * w.asDiagonal() *
         es.eigenvectors().adjoint();
}

double xlog2(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Binary entropy of the spectrum {(1+r)/2, (1-r)/2} of a qubit with Bloch
// length r.
double qubit_entropy(double bloch_len) {
  const double r = std::min(bloch_len, 1.0);
  return -xlog2(0.5 * (1.0 + r)) - xlog2(0.5 * (1.0 - r));
}

struct BlochForm {
  Vector3d a;           // local vector of qubit A
  Vector3d b;           // local vector of qubit B
  Eigen::Matrix3d t;    // correlation matrix
};

BlochForm bloch_form(const Matrix4cd& rho) {
  BlochForm out;
  const auto& sigma = pauli();
  auto tr = [](const Matrix4cd& m) { return m.trace().real(); };
  const Matrix2cd eye = Matrix2cd::Identity();
  for (int i = 0; i < 3; ++i) {
    out.a(i) = tr(rho * Eigen::kroneckerProduct(sigma[i], eye).eval());
    out.b(i) = tr(rho * Eigen::kroneckerProduct(eye, sigma[i]).eval());
    for (int j = 0; j < 3; ++j)
      out.t(i, j) = tr(rho * Eigen::kroneckerProduct(sigma[i], sigma[j]).eval());
  }
  return out;
}

// Average conditional entropy of the unmeasured qubit after a projective
// measurement along direction (theta, phi) of the measured one.
double conditional_entropy(const BlochForm& f, Subsystem measured,
                           double theta, double phi) {
  const Vector3d n(std::sin(theta) * std::cos(phi),
                   std::sin(theta) * std::sin(phi), std::cos(theta));
  const Vector3d& local = (measured == Subsystem::A) ? f.a : f.b;
  const Vector3d coupled = (measured == Subsystem::A)
                               ? Vector3d(f.t.transpose() * n)
                               : Vector3d(f.t * n);
  const Vector3d& other = (measured == Subsystem::A) ? f.b : f.a;
  double out = 0.0;
  for (const double sign : {1.0, -1.0}) {
    const double prob = 0.5 * (1.0 + sign * n.dot(local));
    if (prob < 1e-15) continue;
    const Vector3d r = (other + sign * coupled) / (2.0 * prob);
    out += prob * qubit_entropy(r.norm());
  }
  return out;
}

}  // namespace

bool is_valid_density_matrix(const DensityMatrix4& rho, double tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol ||
      std::abs(rho.trace().imag()) > tol)
    return false;
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

void require_density_matrix(const DensityMatrix4& rho, double tol) {
  if (!is_valid_density_matrix(rho, tol))
    throw std::invalid_argument(
        "density matrix must be Hermitian, unit-trace and positive");
}

DensityMatrix4 werner(double p) {
  if (!(p >= -1.0 / 3.0 - 1e-12 && p <= 1.0 + 1e-12))
    throw std::domain_error("werner: p must be in [-1/3, 1]");
  return p * bell_state(Bell::PsiMinus) +
         (1.0 - p) / 4.0 * DensityMatrix4::Identity();
}

DensityMatrix4 werner_from_mixing(double p) {
  if (!(p > -1.0 && p <= 1.0 + 1e-12))
    throw std::domain_error(
        "werner_from_mixing: p must be in (-1, 1]; the mixing weight "
        "diverges at p = -1");
  const double f1 = 0.5 * (1.0 + p);
  const double f2 = 0.5 * (1.0 - p);
  const double lam = (1.0 + 3.0 * p) / (2.0 * (1.0 + p));
  const DensityMatrix4 entangled_pair =
      lam * bell_state(Bell::PsiMinus) + (1.0 - lam) * bell_state(Bell::PsiPlus);
  const DensityMatrix4 phi_mix =
      0.5 * (bell_state(Bell::PhiPlus) + bell_state(Bell::PhiMinus));
  return f1 * entangled_pair + f2 * phi_mix;
}

double uhlmann_fidelity(const DensityMatrix4& rho1, const DensityMatrix4& rho2) {
  require_density_matrix(rho1);
  require_density_matrix(rho2);
  const Matrix4cd s1 = sqrt_psd(rho1);
  Matrix4cd inner = s1 * rho2 * s1;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(inner, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i)
    sum += std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return std::clamp(sum * sum, 0.0, 1.0);
}

double trace_distance(const DensityMatrix4& rho1, const DensityMatrix4& rho2) {
  const Matrix4cd diff = rho1 - rho2;
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Eigen::Matrix2cd partial_trace(const DensityMatrix4& rho, Subsystem keep) {
  Matrix2cd out = Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out(i, j) += (keep == Subsystem::A) ? rho(2 * i + k, 2 * j + k)
                                            : rho(2 * k + i, 2 * k + j);
  return out;
}

DensityMatrix4 partial_transpose(const DensityMatrix4& rho, Subsystem side) {
  DensityMatrix4 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          out(2 * a + b, 2 * c + d) = (side == Subsystem::B)
                                          ? rho(2 * a + d, 2 * c + b)
                                          : rho(2 * c + b, 2 * a + d);
  return out;
}

double min_ppt_eigenvalue(const DensityMatrix4& rho) {
  require_density_matrix(rho);
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(partial_transpose(rho),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double discord_analytic_werner(double p) {
  if (!(p >= 0.0 && p <= 1.0 + 1e-12))
    throw std::domain_error("discord_analytic_werner: p must be in [0, 1]");
  p = std::min(p, 1.0);
  auto term = [](double w, double x) { return x > 0.0 ? w * std::log2(x) : 0.0; };
  return term((1.0 + 3.0 * p) / 4.0, 1.0 + 3.0 * p) +
         term((1.0 - p) / 4.0, 1.0 - p) - term((1.0 + p) / 2.0, 1.0 + p);
}

DiscordResult discord_numeric(const DensityMatrix4& rho, Subsystem measured) {
  require_density_matrix(rho);
  const Matrix2cd rho_a = partial_trace(rho, Subsystem::A);
  const Matrix2cd rho_b = partial_trace(rho, Subsystem::B);
  const double mutual = entropy(rho_a) + entropy(rho_b) - entropy(rho);
  const BlochForm form = bloch_form(rho);

  // coarse grid over the Bloch sphere, then a simplex polish
  constexpr int kThetaPts = 32;
  constexpr int kPhiPts = 64;
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0, best_phi = 0.0;
  for (int i = 0; i < kThetaPts; ++i) {
    const double theta = std::numbers::pi * i / (kThetaPts - 1);
    for (int j = 0; j < kPhiPts; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / kPhiPts;
      const double v = conditional_entropy(form, measured, theta, phi);
      if (v < best) { best = v; best_theta = theta; best_phi = phi; }
    }
  }
  Eigen::VectorXd start(2);
  start << best_theta, best_phi;
  const auto polish = optim::nelder_mead(
      [&](const Eigen::VectorXd& x) {
        return conditional_entropy(form, measured, x(0), x(1));
      },
      start, std::numbers::pi / kThetaPts, 1e-14, 1e-8, 400);
  if (polish.fval < best) {
    best = polish.fval;
    best_theta = polish.x(0);
    best_phi = polish.x(1);
  }

  const double unmeasured_entropy =
      (measured == Subsystem::A) ? entropy(rho_b) : entropy(rho_a);
  const double classical = unmeasured_entropy - best;
  double value = mutual - classical;
  if (value < -1e-6 || value > mutual + 1e-6)
    throw std::runtime_error(
        "discord_numeric: measurement optimization did not converge (value " +
        std::to_string(value) + ", mutual information " +
        std::to_string(mutual) + ")");
  value = std::max(0.0, value);
  return {value, mutual, classical, best_theta, best_phi};
}

WernerFit closest_werner(const DensityMatrix4& rho) {
  require_density_matrix(rho);
  auto neg_fidelity = [&](double p) { return -uhlmann_fidelity(rho, werner(p)); };
  const double p =
      optim::scan_then_golden_min(neg_fidelity, -1.0 / 3.0, 1.0, 41, 1e-7);
  return {p, uhlmann_fidelity(rho, werner(p))};
}

}  // namespace qst
