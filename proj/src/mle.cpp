#include "qst/mle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qst/optim.hpp"

namespace qst {

namespace {

using Eigen::Matrix4cd;
using Eigen::Vector4cd;
using std::complex;

constexpr double kProbFloor = 1e-12;

// strict lower-triangle coordinates matching the parameter layout
constexpr std::array<std::pair<int, int>, 6> kLowerIdx = {
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

Matrix4cd triangular_from_params(const CholeskiParams& p) {
  Matrix4cd t = Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i) t(i, i) = p.t[i];
  for (std::size_t k = 0; k < kLowerIdx.size(); ++k) {
    const auto [i, j] = kLowerIdx[k];
    t(i, j) = complex<double>(p.t[4 + 2 * k], p.t[5 + 2 * k]);
  }
  return t;
}

void require_counts(const CountRecord& c) {
  for (double n : c.counts)
    if (!(n >= 0.0) || !std::isfinite(n))
      throw std::invalid_argument("count record: counts must be finite and >= 0");
  if (!(c.normalization() > 0.0))
    throw std::invalid_argument(
        "count record: normalization (sum of the first four counts) must be > 0");
}

// Pauli product basis B_k = sigma_i (x) sigma_j, orthogonal with
// Tr[B_k B_l] = 4 delta_kl; used by the linear-inversion seed.
const std::array<Matrix4cd, 16>& pauli_product_basis() {
  static const std::array<Matrix4cd, 16> basis = [] {
    std::array<Eigen::Matrix2cd, 4> sigma;
    sigma[0] = Eigen::Matrix2cd::Identity();
    sigma[1] << 0, 1, 1, 0;
    sigma[2] << 0, complex<double>(0, -1), complex<double>(0, 1), 0;
    sigma[3] << 1, 0, 0, -1;
    std::array<Matrix4cd, 16> out;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Matrix4cd m;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
              for (int d = 0; d < 2; ++d)
                m(2 * a + c, 2 * b + d) = sigma[i](a, b) * sigma[j](c, d);
        out[4 * i + j] = m;
      }
    return out;
  }();
  return basis;
}

}  // namespace

const ProjectorSet& standard_projector_set() {
  static const ProjectorSet set = [] {
    ProjectorSet out;
    out.id = "canonical-16";
    const Eigen::Vector2cd h(1, 0), v(0, 1);
    const double q = 1.0 / std::numbers::sqrt2;
    const Eigen::Vector2cd d = q * (h + v);
    const Eigen::Vector2cd l = q * (h + complex<double>(0, 1) * v);
    const Eigen::Vector2cd r = q * (h - complex<double>(0, 1) * v);
    auto ket1 = [&](char c) -> const Eigen::Vector2cd& {
      switch (c) {
        case 'H': return h;
        case 'V': return v;
        case 'D': return d;
        case 'L': return l;
        case 'R': return r;
      }
      throw std::logic_error("unknown polarization label");
    };
    const std::array<const char*, 16> names = {
        "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
        "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
    for (int j = 0; j < 16; ++j) {
      const Eigen::Vector2cd& first = ket1(names[j][0]);
      const Eigen::Vector2cd& second = ket1(names[j][1]);
      Vector4cd k;
      k << first(0) * second(0), first(0) * second(1), first(1) * second(0),
          first(1) * second(1);
      out.kets[j] = k;
      out.labels[j] = names[j];
    }
    Eigen::Matrix<double, 16, 16> gram;
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b)
        gram(a, b) = std::norm(out.kets[a].dot(out.kets[b]));
    Eigen::JacobiSVD<Eigen::Matrix<double, 16, 16>> svd(gram);
    out.gram_condition = svd.singularValues()(0) / svd.singularValues()(15);
    return out;
  }();
  return set;
}

CountRecord simulate_counts(const DensityMatrix4& rho, double n_scale, Rng& rng,
                            CountNoise noise) {
  require_density_matrix(rho);
  if (!(n_scale > 0.0))
    throw std::invalid_argument("simulate_counts: n_scale must be > 0");
  const ProjectorSet& ps = standard_projector_set();
  CountRecord out;
  for (int j = 0; j < 16; ++j) {
    const double prob =
        std::max(0.0, (ps.kets[j].adjoint() * rho * ps.kets[j])(0).real());
    const double mean = n_scale * prob;
    out.counts[j] = (noise == CountNoise::Poisson)
                        ? static_cast<double>(poisson(rng, mean))
                        : mean;
  }
  return out;
}

DensityMatrix4 rho_from_choleski(const CholeskiParams& params) {
  const Matrix4cd t = triangular_from_params(params);
  const Matrix4cd gram = t.adjoint() * t;
  const double trace = gram.trace().real();
  if (!(trace > 0.0))
    throw std::invalid_argument(
        "rho_from_choleski: all-zero parameters are degenerate");
  return gram / trace;
}

CholeskiParams choleski_from_rho(const DensityMatrix4& rho) {
  require_density_matrix(rho, 1e-8);
  // rho = T^dag T with lower-triangular T is the index-reversed Cholesky
  // factorization; jitter keeps the factorization of rank-deficient states
  // well defined.
  Matrix4cd padded = rho + 1e-12 * Matrix4cd::Identity();
  padded /= padded.trace().real();
  const Matrix4cd reversed = padded.reverse();
  const Eigen::LLT<Matrix4cd> llt(reversed);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("choleski_from_rho: factorization failed");
  const Matrix4cd lower = Matrix4cd(llt.matrixL()).adjoint().reverse();
  CholeskiParams out;
  for (int i = 0; i < 4; ++i) out.t[i] = lower(i, i).real();
  for (std::size_t k = 0; k < kLowerIdx.size(); ++k) {
    const auto [i, j] = kLowerIdx[k];
    out.t[4 + 2 * k] = lower(i, j).real();
    out.t[5 + 2 * k] = lower(i, j).imag();
  }
  return out;
}

double likelihood(const CholeskiParams& params, const CountRecord& counts,
                  const ProjectorSet& projectors) {
  require_counts(counts);
  const DensityMatrix4 rho = rho_from_choleski(params);
  const double norm = counts.normalization();
  double total = 0.0;
  for (int j = 0; j < 16; ++j) {
    const double q = std::max(
        kProbFloor,
        (projectors.kets[j].adjoint() * rho * projectors.kets[j])(0).real());
    const double miss = norm * q - counts.counts[j];
    total += miss * miss / (2.0 * norm * q);
  }
  return total;
}

Eigen::Matrix<double, 16, 1> likelihood_gradient(const CholeskiParams& params,
                                                 const CountRecord& counts,
                                                 const ProjectorSet& projectors) {
  require_counts(counts);
  const Matrix4cd t = triangular_from_params(params);
  const Matrix4cd gram = t.adjoint() * t;
  const double trace = gram.trace().real();
  if (!(trace > 0.0))
    throw std::invalid_argument("likelihood_gradient: degenerate parameters");
  const double norm = counts.normalization();

  std::array<Vector4cd, 16> mapped;  // T |psi_j>
  std::array<double, 16> raw_prob;
  for (int j = 0; j < 16; ++j) {
    mapped[j] = t * projectors.kets[j];
    raw_prob[j] = mapped[j].squaredNorm() / trace;
  }
  // d/dq of one term: N/2 - n^2 / (2 N q^2); frozen below the floor
  std::array<double, 16> dq;
  for (int j = 0; j < 16; ++j) {
    if (raw_prob[j] > kProbFloor) {
      dq[j] = 0.5 * norm -
              counts.counts[j] * counts.counts[j] /
                  (2.0 * norm * raw_prob[j] * raw_prob[j]);
    } else {
      dq[j] = 0.0;
    }
  }

  Eigen::Matrix<double, 16, 1> grad = Eigen::Matrix<double, 16, 1>::Zero();
  auto accumulate = [&](int param, int row, int col, complex<double> unit) {
    // dT = unit * E_{row,col}:
    //   d<psi|T^dag T|psi> = 2 Re[conj((T psi)_row) unit psi_col]
    //   d Tr[T^dag T]      = 2 Re[conj(T_{row,col}) unit]
    const double dtrace = 2.0 * std::real(std::conj(t(row, col)) * unit);
    for (int j = 0; j < 16; ++j) {
      const double dnum =
          2.0 * std::real(std::conj(mapped[j](row)) * unit *
                          projectors.kets[j](col));
      grad(param) += dq[j] * (dnum - raw_prob[j] * dtrace) / trace;
    }
  };
  for (int i = 0; i < 4; ++i) accumulate(i, i, i, 1.0);
  for (std::size_t k = 0; k < kLowerIdx.size(); ++k) {
    const auto [i, j] = kLowerIdx[k];
    accumulate(4 + 2 * static_cast<int>(k), i, j, 1.0);
    accumulate(5 + 2 * static_cast<int>(k), i, j, complex<double>(0, 1));
  }
  return grad;
}

DensityMatrix4 linear_inversion_estimate(const CountRecord& counts,
                                         const ProjectorSet& projectors) {
  require_counts(counts);
  const auto& basis = pauli_product_basis();
  Eigen::Matrix<double, 16, 16> design;
  Eigen::Matrix<double, 16, 1> freq;
  for (int j = 0; j < 16; ++j) {
    for (int k = 0; k < 16; ++k)
      design(j, k) =
          (projectors.kets[j].adjoint() * basis[k] * projectors.kets[j])(0)
              .real();
    freq(j) = counts.counts[j] / counts.normalization();
  }
  const Eigen::Matrix<double, 16, 1> coeff = design.partialPivLu().solve(freq);
  Matrix4cd rho = Matrix4cd::Zero();
  for (int k = 0; k < 16; ++k) rho += coeff(k) * basis[k];
  rho = 0.5 * (rho + rho.adjoint()).eval();

  // clamp to the physical cone and renormalize
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(rho);
  Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0);
  if (w.sum() <= 0.0) return Matrix4cd::Identity() / 4.0;
  w /= w.sum();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

MleResult mle_fit(const CountRecord& counts, const ProjectorSet& projectors,
                  std::optional<CholeskiParams> init, const MleOptions& options) {
  require_counts(counts);

  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    CholeskiParams p;
    for (int i = 0; i < 16; ++i) p.t[i] = x(i);
    grad = likelihood_gradient(p, counts, projectors);
    return likelihood(p, counts, projectors);
  };

  // gradients scale linearly with the count normalization
  const double gtol = options.gradient_tol * std::max(1.0, counts.normalization());

  MleResult best;
  best.diagnostics.final_likelihood = std::numeric_limits<double>::infinity();
  bool have_converged = false;
  int restarts_used = 0;
  auto try_start = [&](Eigen::VectorXd x0) {
    if (x0.norm() < 1e-12) x0(0) = 1.0;
    x0 /= x0.norm();  // the parametrization is scale invariant
    const auto run = optim::bfgs(objective, x0, gtol, options.max_iterations);
    // a converged run always beats a stalled one; ties go to the lower value.
    // The factorized parametrization has rank-deficient saddles, so a
    // "converged" run may still be local -- keeping the best over starts
    // (the seeded start in particular) guards against that.
    const bool better =
        (run.converged && !have_converged) ||
        (run.converged == have_converged &&
         run.fval < best.diagnostics.final_likelihood);
    if (better) {
      for (int i = 0; i < 16; ++i) best.params.t[i] = run.x(i);
      best.diagnostics.final_likelihood = run.fval;
      best.diagnostics.iterations = run.iterations;
      best.diagnostics.converged = run.converged;
      best.diagnostics.restarts_used = restarts_used;
      have_converged = have_converged || run.converged;
    }
  };

  if (init) {
    Eigen::VectorXd x0(16);
    for (int i = 0; i < 16; ++i) x0(i) = init->t[i];
    try_start(x0);
  }
  {
    const CholeskiParams seeded =
        choleski_from_rho(linear_inversion_estimate(counts, projectors));
    Eigen::VectorXd x0(16);
    for (int i = 0; i < 16; ++i) x0(i) = seeded.t[i];
    try_start(x0);
  }
  Rng restart_rng(options.seed);
  for (int r = 0; r < options.restarts && !have_converged; ++r) {
    ++restarts_used;
    Eigen::VectorXd x0(16);
    for (int i = 0; i < 16; ++i) x0(i) = gaussian(restart_rng);
    try_start(x0);
  }
  if (!have_converged)
    throw std::runtime_error("mle_fit: optimizer failed on all starts");
  best.rho = rho_from_choleski(best.params);
  return best;
}

}  // namespace qst
