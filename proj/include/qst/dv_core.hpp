// Two-qubit state algebra: Bell/Werner construction, Uhlmann fidelity,
// the minimum partial-transpose eigenvalue and quantum discord.
//
// Basis order is the polarization product basis {HH, HV, VH, VV}.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qst {

using DensityMatrix4 = Eigen::Matrix4cd;

enum class Bell { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
enum class Subsystem { A, B };

inline constexpr double kDensityMatrixTol = 1e-10;

inline Eigen::Vector4cd bell_ket(Bell which) {
  const double q = 1.0 / std::numbers::sqrt2;
  switch (which) {
    case Bell::PhiPlus:  return {q, 0, 0, q};
    case Bell::PhiMinus: return {q, 0, 0, -q};
    case Bell::PsiPlus:  return {0, q, q, 0};
    case Bell::PsiMinus: return {0, q, -q, 0};
  }
  throw std::invalid_argument("bell_ket: unknown Bell state");
}

inline DensityMatrix4 bell_state(Bell which) {
  const Eigen::Vector4cd k = bell_ket(which);
  return k * k.adjoint();
}

// Hermitian within tol, unit trace within tol, eigenvalues >= -tol.
bool is_valid_density_matrix(const DensityMatrix4& rho,
                             double tol = kDensityMatrixTol);
void require_density_matrix(const DensityMatrix4& rho,
                            double tol = kDensityMatrixTol);

// p |Psi-><Psi-| + (1-p)/4 I, for -1/3 <= p <= 1.
DensityMatrix4 werner(double p);

// The same state assembled as f1 [lam |Psi-><Psi-| + (1-lam) |Psi+><Psi+|]
// + f2 (|Phi+><Phi+| + |Phi-><Phi-|)/2 with f1 = (1+p)/2, f2 = (1-p)/2 and
// lam = (1+3p)/(2(1+p)); defined for p in (-1, 1].
DensityMatrix4 werner_from_mixing(double p);

// F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.
double uhlmann_fidelity(const DensityMatrix4& rho1, const DensityMatrix4& rho2);

// 0.5 * || rho1 - rho2 ||_1.
double trace_distance(const DensityMatrix4& rho1, const DensityMatrix4& rho2);

// Minimum eigenvalue of the partial transpose; negative iff entangled.
double min_ppt_eigenvalue(const DensityMatrix4& rho);

// Closed form for the discord of a Werner state, valid for p in [0, 1].
double discord_analytic_werner(double p);

struct DiscordResult {
  double value{0};
  double mutual_info{0};
  double classical_corr{0};
  double theta{0};  // optimal measurement direction on the measured qubit
  double phi{0};
};

// Mutual information minus the classical correlations extractable by the
// best local projective measurement on `measured`.
DiscordResult discord_numeric(const DensityMatrix4& rho,
                              Subsystem measured = Subsystem::A);

struct WernerFit {
  double p{0};
  double fidelity{0};
};

// argmax over p in [-1/3, 1] of F(rho, werner(p)).
WernerFit closest_werner(const DensityMatrix4& rho);

// von Neumann entropy in bits, with 0 log 0 := 0. Works for any Hermitian
// density matrix (2x2, 4x4, ...).
template <typename Derived>
double entropy(const Eigen::MatrixBase<Derived>& rho) {
  using Mat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat m = rho.template cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  double out = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 0.0) out -= lam * std::log2(lam);
  }
  return out;
}

Eigen::Matrix2cd partial_trace(const DensityMatrix4& rho, Subsystem keep);
DensityMatrix4 partial_transpose(const DensityMatrix4& rho,
                                 Subsystem side = Subsystem::B);

}  // namespace qst
