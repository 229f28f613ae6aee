// Small self-contained optimizers: 1-d golden-section search, a 2-d/n-d
// Nelder-Mead simplex and dense BFGS with Armijo backtracking. Enough for
// the low-dimensional smooth objectives in this project.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace qst::optim {

// Minimize f on [lo, hi] to an argument tolerance `xtol`. f must be
// unimodal on the bracket for a guaranteed global minimum.
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double xtol,
                          int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

template <typename F>
double golden_section_max(F&& f, double lo, double hi, double xtol,
                          int max_iter = 200) {
  return golden_section_min([&](double x) { return -f(x); }, lo, hi, xtol,
                            max_iter);
}

// Coarse scan over n_points, then golden-section polish inside the
// bracketing pair of scan cells. Robust to mild non-unimodality.
template <typename F>
double scan_then_golden_min(F&& f, double lo, double hi, int n_points,
                            double xtol) {
  int best = 0;
  double fbest = f(lo);
  for (int i = 1; i < n_points; ++i) {
    const double x = lo + (hi - lo) * i / (n_points - 1);
    const double fx = f(x);
    if (fx < fbest) { fbest = fx; best = i; }
  }
  const double step = (hi - lo) / (n_points - 1);
  const double a = std::max(lo, lo + (best - 1) * step);
  const double b = std::min(hi, lo + (best + 1) * step);
  return golden_section_min(f, a, b, xtol);
}

struct SimplexResult {
  Eigen::VectorXd x;
  double fval{0};
  int iterations{0};
  bool converged{false};
};

// Plain Nelder-Mead with standard coefficients.
template <typename F>
SimplexResult nelder_mead(F&& f, const Eigen::VectorXd& x0, double step,
                          double ftol = 1e-12, double xtol = 1e-10,
                          int max_iter = 500) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += step;
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  SimplexResult result;
  int it = 0;
  for (; it < max_iter; ++it) {
    // order by function value
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    {
      std::vector<Eigen::VectorXd> p2(n + 1);
      std::vector<double> f2(n + 1);
      for (int i = 0; i <= n; ++i) { p2[i] = pts[idx[i]]; f2[i] = fv[idx[i]]; }
      pts.swap(p2); fv.swap(f2);
    }
    double xspread = 0.0;
    for (int i = 1; i <= n; ++i)
      xspread = std::max(xspread, (pts[i] - pts[0]).template lpNorm<Eigen::Infinity>());
    if (std::abs(fv[n] - fv[0]) < ftol && xspread < xtol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd refl = centroid + (centroid - pts[n]);
    const double frefl = f(refl);
    if (frefl < fv[0]) {
      const Eigen::VectorXd expa = centroid + 2.0 * (centroid - pts[n]);
      const double fexpa = f(expa);
      if (fexpa < frefl) { pts[n] = expa; fv[n] = fexpa; }
      else { pts[n] = refl; fv[n] = frefl; }
    } else if (frefl < fv[n - 1]) {
      pts[n] = refl; fv[n] = frefl;
    } else {
      const Eigen::VectorXd contr = centroid + 0.5 * (pts[n] - centroid);
      const double fcontr = f(contr);
      if (fcontr < fv[n]) { pts[n] = contr; fv[n] = fcontr; }
      else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  result.x = pts[0];
  result.fval = fv[0];
  result.iterations = it;
  return result;
}

struct BfgsResult {
  Eigen::VectorXd x;
  double fval{0};
  int iterations{0};
  bool converged{false};
};

// Dense BFGS. `fg(x, grad)` returns f and fills grad. Terminates on the
// infinity norm of the gradient.
template <typename FG>
BfgsResult bfgs(FG&& fg, Eigen::VectorXd x, double gtol = 1e-9,
                int max_iter = 500) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd grad(n), grad_new(n);
  double fval = fg(x, grad);

  BfgsResult result;
  int it = 0;
  bool reset_done = false;
  for (; it < max_iter; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < gtol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0)) {  // not a descent direction; restart from steepest
      hinv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }

    // Armijo backtracking
    double alpha = 1.0;
    double fnew = fval;
    Eigen::VectorXd xnew = x;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      xnew = x + alpha * dir;
      fnew = fg(xnew, grad_new);
      if (fnew <= fval + 1e-4 * alpha * slope) { ok = true; break; }
      alpha *= 0.5;
    }
    if (!ok) {
      if (!reset_done) {   // one full restart before giving up
        hinv.setIdentity();
        reset_done = true;
        continue;
      }
      // no representable descent step left: stationary to double precision
      result.converged = std::abs(slope) < 1e-12 * std::max(1.0, std::abs(fval));
      break;
    }

    const Eigen::VectorXd s = xnew - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      hinv = (eye - rho * s * y.transpose()) * hinv *
                 (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    x = xnew;
    fval = fnew;
    grad = grad_new;
  }
  result.x = x;
  result.fval = fval;
  result.iterations = it;
  return result;
}

}  // namespace qst::optim
