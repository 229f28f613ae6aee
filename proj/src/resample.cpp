#include "qst/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qst {

namespace {

// linearly interpolated percentile of sorted data, q in [0, 100]
double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted.front();
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

QuantityStats summarize(std::span<const double> values) {
  QuantityStats out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  out.p2_5 = percentile_sorted(sorted, 2.5);
  out.p16 = percentile_sorted(sorted, 16.0);
  out.p84 = percentile_sorted(sorted, 84.0);
  out.p97_5 = percentile_sorted(sorted, 97.5);
  return out;
}

CvReplicaEnsemble cv_replicas(const StsParams& target, std::size_t m_samples,
                              std::size_t n_mc, std::uint64_t seed,
                              std::string target_id) {
  require_valid(target);
  if (n_mc < 1) throw std::invalid_argument("cv_replicas: n_mc must be >= 1");
  if (m_samples < 2)
    throw std::invalid_argument("cv_replicas: m_samples must be >= 2");

  CvReplicaEnsemble out;
  out.target_id = std::move(target_id);
  out.target = target;
  out.m_samples = m_samples;
  out.seed = seed;
  out.replicas.reserve(n_mc);
  for (std::size_t i = 0; i < n_mc; ++i) {
    CvReplica rep;
    try {
      const HomodyneDataset ds = simulate_homodyne(
          target, m_samples, PhaseSchedule::LinearRamp, derive_seed(seed, i));
      const CmReconstruction rec = reconstruct_cm(ds);
      rep.cm = rec.cm;
      rep.n_tot = rec.photon_number.value;
      rep.sigma_n_tot = rec.photon_number.sigma;
      // convert through the squeezed-thermal form: diagonal part only
      rep.params = params_from_cm(
          CovarianceMatrix2{rec.cm.var_x, rec.cm.var_p, 0.0});
      rep.ok = true;
    } catch (const std::exception& ex) {
      rep.ok = false;
      rep.error = ex.what();
      ++out.failures;
    }
    out.replicas.push_back(std::move(rep));
  }
  if (out.failures == n_mc)
    throw std::runtime_error("cv_replicas: every replica failed (" +
                             out.replicas.front().error + ")");
  return out;
}

DvReplicaEnsemble dv_replicas(const CountRecord& base,
                              const ProjectorSet& projectors, std::size_t n_mc,
                              std::uint64_t seed, double noise_scale) {
  if (n_mc < 1) throw std::invalid_argument("dv_replicas: n_mc must be >= 1");
  if (!(noise_scale >= 0.0))
    throw std::invalid_argument("dv_replicas: noise_scale must be >= 0");

  DvReplicaEnsemble out;
  out.base = base;
  out.seed = seed;
  out.noise_scale = noise_scale;
  out.replicas.reserve(n_mc);
  std::string last_error;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const std::uint64_t child = derive_seed(seed, i);
    Rng rng(child);
    CountRecord resampled = base;
    for (double& n : resampled.counts) {
      n = std::max(0.0, n + noise_scale * std::sqrt(std::max(0.0, n)) *
                            gaussian(rng));
    }
    try {
      MleOptions options;
      options.seed = derive_seed(child, 1);
      out.replicas.push_back(mle_fit(resampled, projectors, std::nullopt, options).rho);
    } catch (const std::exception& ex) {
      last_error = ex.what();
      ++out.failures;
    }
  }
  if (out.failures * 100 > n_mc)
    throw std::runtime_error(
        "dv_replicas: fit failure rate above 1% (" +
        std::to_string(out.failures) + "/" + std::to_string(n_mc) +
        "; last error: " + last_error + ")");
  return out;
}

std::vector<DvReplicaDerived> derive_dv_quantities(const DvReplicaEnsemble& e,
                                                   const DensityMatrix4& target) {
  std::vector<DvReplicaDerived> out;
  out.reserve(e.replicas.size());
  for (const DensityMatrix4& rho : e.replicas) {
    DvReplicaDerived d;
    d.min_ppt = min_ppt_eigenvalue(rho);
    d.discord = discord_numeric(rho).value;
    d.fidelity_to_target = uhlmann_fidelity(rho, target);
    const WernerFit fit = closest_werner(rho);
    d.werner_p = fit.p;
    d.werner_fidelity = fit.fidelity;
    out.push_back(d);
  }
  return out;
}

BalloonResult fidelity_balloon(const BalloonSpec& spec,
                               const BalloonGridSpec& grid) {
  require_valid(spec.target);
  if (!(spec.f_threshold > 0.0 && spec.f_threshold < 1.0 + 1e-12))
    throw std::invalid_argument("fidelity_balloon: threshold must be in (0, 1]");
  if (grid.n_s < 1 || grid.n_mu < 1 || !(grid.s_max > grid.s_min) ||
      !(grid.mu_max > grid.mu_min) || !(grid.s_min > 0.0) ||
      !(grid.mu_min > 0.0) || grid.mu_max > 1.0 + 1e-12)
    throw std::invalid_argument("fidelity_balloon: empty or invalid grid");
  if (spec.energy_window && !(spec.energy_window->second > 0.0))
    throw std::invalid_argument("fidelity_balloon: energy window width must be > 0");

  const CovarianceMatrix2 target_cm = cm_from_params(spec.target);
  BalloonResult out;
  out.spec = spec;
  out.grid = grid;
  out.points.reserve(static_cast<std::size_t>(grid.n_s) * grid.n_mu);
  std::size_t classical_inside = 0;
  for (int j = 0; j < grid.n_mu; ++j) {
    const double mu =
        grid.n_mu == 1 ? grid.mu_min
                       : grid.mu_min + (grid.mu_max - grid.mu_min) * j / (grid.n_mu - 1);
    for (int i = 0; i < grid.n_s; ++i) {
      const double s =
          grid.n_s == 1 ? grid.s_min
                        : grid.s_min + (grid.s_max - grid.s_min) * i / (grid.n_s - 1);
      const StsParams p{s, mu};
      BalloonPoint pt;
      pt.s = s;
      pt.mu = mu;
      pt.fidelity = gaussian_fidelity(cm_from_params(p), target_cm);
      pt.in_balloon = pt.fidelity > spec.f_threshold;
      if (spec.energy_window) {
        const double energy = p.total_photons();
        pt.in_stripe = pt.in_balloon &&
                       std::abs(energy - spec.energy_window->first) <
                           spec.energy_window->second;
      }
      pt.nonclassical = is_nonclassical(p);
      if (pt.in_balloon) {
        ++out.in_balloon_count;
        if (!pt.nonclassical) ++classical_inside;
      }
      out.points.push_back(pt);
    }
  }
  out.classical_fraction_in_balloon =
      out.in_balloon_count == 0
          ? 0.0
          : static_cast<double>(classical_inside) /
                static_cast<double>(out.in_balloon_count);
  return out;
}

EnsembleStats classify_ensemble(const CvReplicaEnsemble& e) {
  std::vector<double> s, mu, vx, vp, n_tot;
  std::size_t nonclassical = 0, valid = 0;
  for (const CvReplica& rep : e.replicas) {
    if (!rep.ok) continue;
    ++valid;
    s.push_back(rep.params.s);
    mu.push_back(rep.params.mu);
    vx.push_back(rep.cm.var_x);
    vp.push_back(rep.cm.var_p);
    n_tot.push_back(rep.n_tot);
    if (is_nonclassical(rep.params)) ++nonclassical;
  }
  if (valid == 0) throw std::invalid_argument("classify_ensemble: empty ensemble");
  EnsembleStats out;
  out.n = valid;
  out.quantities["s"] = summarize(s);
  out.quantities["mu"] = summarize(mu);
  out.quantities["var_x"] = summarize(vx);
  out.quantities["var_p"] = summarize(vp);
  out.quantities["n_tot"] = summarize(n_tot);
  const double frac = static_cast<double>(nonclassical) / static_cast<double>(valid);
  out.fractions["nonclassical"] = frac;
  out.fractions["classical"] = 1.0 - frac;
  return out;
}

EnsembleStats classify_ensemble(const DvReplicaEnsemble& e,
                                const DensityMatrix4& target) {
  return classify_ensemble(derive_dv_quantities(e, target));
}

EnsembleStats classify_ensemble(std::span<const DvReplicaDerived> derived) {
  if (derived.empty())
    throw std::invalid_argument("classify_ensemble: empty ensemble");
  std::vector<double> min_ppt, discord, fidelity, werner_p;
  std::size_t entangled = 0;
  for (const DvReplicaDerived& d : derived) {
    min_ppt.push_back(d.min_ppt);
    discord.push_back(d.discord);
    fidelity.push_back(d.fidelity_to_target);
    werner_p.push_back(d.werner_p);
    if (d.min_ppt < 0.0) ++entangled;
  }
  EnsembleStats out;
  out.n = derived.size();
  out.quantities["min_ppt"] = summarize(min_ppt);
  out.quantities["discord"] = summarize(discord);
  out.quantities["fidelity_to_target"] = summarize(fidelity);
  out.quantities["werner_p"] = summarize(werner_p);
  const double frac = static_cast<double>(entangled) / static_cast<double>(derived.size());
  out.fractions["entangled"] = frac;
  out.fractions["separable"] = 1.0 - frac;
  return out;
}

BetaFit fit_beta_moments(std::span<const double> values) {
  BetaFit out;
  if (values.size() < 2) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.support_min = *lo;
  out.support_max = *hi;
  const double span = *hi - *lo;
  if (span < 1e-12) return out;  // degenerate: all values equal
  double mean = 0.0;
  for (double v : values) mean += (v - *lo) / span;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) {
    const double y = (v - *lo) / span;
    var += (y - mean) * (y - mean);
  }
  var /= static_cast<double>(values.size() - 1);
  if (var < 1e-15) return out;
  const double common = mean * (1.0 - mean) / var - 1.0;
  out.alpha = mean * common;
  out.beta = (1.0 - mean) * common;
  out.fitted = std::isfinite(out.alpha) && std::isfinite(out.beta) &&
               out.alpha > 0.0 && out.beta > 0.0;
  return out;
}

FidelityHistogram fidelity_histogram(const DvReplicaEnsemble& e,
                                     const DensityMatrix4& target, int bins) {
  if (bins < 5) throw std::invalid_argument("fidelity_histogram: bins must be >= 5");
  if (e.replicas.empty())
    throw std::invalid_argument("fidelity_histogram: empty ensemble");
  FidelityHistogram out;
  out.fidelities.reserve(e.replicas.size());
  for (const DensityMatrix4& rho : e.replicas)
    out.fidelities.push_back(uhlmann_fidelity(rho, target));

  const auto [lo, hi] =
      std::minmax_element(out.fidelities.begin(), out.fidelities.end());
  double left = *lo, right = *hi;
  if (right - left < 1e-12) {  // widen a degenerate support for binning
    left -= 1e-6;
    right += 1e-6;
  }
  out.bin_edges.resize(bins + 1);
  out.counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b)
    out.bin_edges[b] = left + (right - left) * b / bins;
  for (double f : out.fidelities) {
    int b = static_cast<int>((f - left) / (right - left) * bins);
    b = std::clamp(b, 0, bins - 1);
    ++out.counts[b];
  }
  out.fit = fit_beta_moments(out.fidelities);
  out.mean = std::accumulate(out.fidelities.begin(), out.fidelities.end(), 0.0) /
             static_cast<double>(out.fidelities.size());
  if (out.fit.fitted && out.fit.alpha > 1.0 && out.fit.beta > 1.0) {
    const double y = (out.fit.alpha - 1.0) / (out.fit.alpha + out.fit.beta - 2.0);
    out.mode = out.fit.support_min +
               (out.fit.support_max - out.fit.support_min) * y;
  } else {
    const auto peak = std::max_element(out.counts.begin(), out.counts.end());
    const auto idx = static_cast<std::size_t>(peak - out.counts.begin());
    out.mode = 0.5 * (out.bin_edges[idx] + out.bin_edges[idx + 1]);
  }
  return out;
}

DvReplicaEnsemble werner_projection_ensemble(const DvReplicaEnsemble& e) {
  DvReplicaEnsemble out = e;
  out.target_id = e.target_id.empty() ? "werner-projected"
                                      : e.target_id + "-werner-projected";
  for (DensityMatrix4& rho : out.replicas) rho = werner(closest_werner(rho).p);
  return out;
}

}  // namespace qst
