#include "qst/cli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qst/io.hpp"
#include "qst/reference_data.hpp"
#include "qst/resample.hpp"

namespace qst::cli {

namespace {

StsParams cv_target(int one_based) {
  const auto& row = kCvTargets[static_cast<std::size_t>(one_based - 1)];
  return {row.s, row.mu};
}

std::vector<int> resolve_states(const RunConfig& config, int max_index,
                                std::vector<int> defaults) {
  if (config.states.empty()) return defaults;
  for (int s : config.states)
    if (s < 1 || s > max_index)
      throw ConfigError("state index " + std::to_string(s) +
                        " out of range 1.." + std::to_string(max_index));
  return config.states;
}

void ensure_out_dir(const RunConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("output directory not set");
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory " +
                      config.out_dir.string() + ": " + ec.message());
}

void write_output(const RunConfig& config, const std::string& name,
                  const std::string& body) {
  io::write_text_file(config.out_dir / name, header_line(config) + "\n" + body);
}

void write_json_output(const RunConfig& config, const std::string& name,
                       nlohmann::json j) {
  j["_meta"] = {{"seed", config.seed},
                {"experiment", experiment_name(config.experiment)},
                {"config", config_fingerprint(config)}};
  io::write_text_file(config.out_dir / name, j.dump(2) + "\n");
}

struct CvCharacterization {
  int state;
  CmReconstruction rec;
  StsParams params;
  double sigma_s, sigma_mu;
};

CvCharacterization characterize_state(const RunConfig& config, int state) {
  const StsParams target = cv_target(state);
  const HomodyneDataset ds =
      simulate_homodyne(target, config.m_samples, PhaseSchedule::LinearRamp,
                        derive_seed(config.seed, static_cast<std::uint64_t>(state)));
  CvCharacterization out;
  out.state = state;
  out.rec = reconstruct_cm(ds);
  out.params = params_from_cm(
      CovarianceMatrix2{out.rec.cm.var_x, out.rec.cm.var_p, 0.0});
  const double rel = 0.5 * std::hypot(out.rec.sigma_var_x / out.rec.cm.var_x,
                                      out.rec.sigma_var_p / out.rec.cm.var_p);
  out.sigma_s = out.params.s * rel;
  out.sigma_mu = out.params.mu * rel;
  return out;
}

void run_table1(const RunConfig& config) {
  const auto states = resolve_states(config, 14, [] {
    std::vector<int> all(14);
    for (int i = 0; i < 14; ++i) all[i] = i + 1;
    return all;
  }());
  std::string csv =
      "state,var_x,sigma_var_x,var_p,sigma_var_p,n_tot,sigma_n_tot,"
      "s,sigma_s,mu,sigma_mu\n";
  for (int state : states) {
    const CvCharacterization c = characterize_state(config, state);
    std::ostringstream row;
    row << state << ',' << io::format_double(c.rec.cm.var_x) << ','
        << io::format_double(c.rec.sigma_var_x) << ','
        << io::format_double(c.rec.cm.var_p) << ','
        << io::format_double(c.rec.sigma_var_p) << ','
        << io::format_double(c.rec.photon_number.value) << ','
        << io::format_double(c.rec.photon_number.sigma) << ','
        << io::format_double(c.params.s) << ',' << io::format_double(c.sigma_s)
        << ',' << io::format_double(c.params.mu) << ','
        << io::format_double(c.sigma_mu) << '\n';
    csv += row.str();
  }
  write_output(config, "table1.csv", csv);
}

void run_fig2(const RunConfig& config) {
  const auto states = resolve_states(config, 14, [] {
    std::vector<int> all(14);
    for (int i = 0; i < 14; ++i) all[i] = i + 1;
    return all;
  }());

  std::vector<VarianceFitPoint> points;
  for (int state : states) {
    VarianceFitPoint pt;
    if (config.noiseless) {
      // exact model points at the quoted energies, common n_s
      pt.n_tot = kCvTargets[static_cast<std::size_t>(state - 1)].n_tot;
      const auto [vx, vp] = variances_from_energy(pt.n_tot, config.fit_n_s);
      pt.var_x = vx;
      pt.var_p = vp;
      pt.sigma_var_x = pt.sigma_var_p = 1.0;
    } else {
      const CvCharacterization c = characterize_state(config, state);
      pt.n_tot = c.rec.photon_number.value;
      pt.var_x = c.rec.cm.var_x;
      pt.sigma_var_x = c.rec.sigma_var_x;
      pt.var_p = c.rec.cm.var_p;
      pt.sigma_var_p = c.rec.sigma_var_p;
    }
    points.push_back(pt);
  }
  const VarianceFitResult fit = fit_squeezed_photons(points);

  std::string csv = "n_tot,var_x,sigma_var_x,var_p,sigma_var_p\n";
  for (const auto& pt : points) {
    csv += io::format_double(pt.n_tot) + "," + io::format_double(pt.var_x) +
           "," + io::format_double(pt.sigma_var_x) + "," +
           io::format_double(pt.var_p) + "," +
           io::format_double(pt.sigma_var_p) + "\n";
  }
  write_output(config, "fig2_points.csv", csv);

  std::string curve = "n_tot,var_x_model,var_p_model\n";
  constexpr int kCurvePts = 61;
  const double n_hi = 1.5;
  for (int i = 0; i < kCurvePts; ++i) {
    const double n_tot = fit.n_s + (n_hi - fit.n_s) * i / (kCurvePts - 1);
    const auto [vx, vp] = variances_from_energy(n_tot, fit.n_s);
    curve += io::format_double(n_tot) + "," + io::format_double(vx) + "," +
             io::format_double(vp) + "\n";
  }
  write_output(config, "fig2_fit.csv", curve);

  write_json_output(config, "fig2_summary.json",
                    {{"n_s", fit.n_s}, {"db", fit.db}, {"chi2", fit.chi2}});
}

void run_fig3(const RunConfig& config) {
  const auto states = resolve_states(config, 14, {7, 9, 13});
  const double threshold = config.threshold > 0 ? config.threshold : 0.995;
  nlohmann::json summary;
  for (int state : states) {
    const auto& row = kCvTargets[static_cast<std::size_t>(state - 1)];
    BalloonSpec spec;
    spec.target = cv_target(state);
    spec.f_threshold = threshold;
    spec.energy_window = {{row.n_tot, row.sigma_n_tot}};
    const BalloonResult result = fidelity_balloon(spec, BalloonGridSpec{});
    write_output(config, "fig3_state" + std::to_string(state) + ".csv",
                 io::balloon_csv(result));
    summary["state" + std::to_string(state)] = {
        {"threshold", threshold},
        {"in_balloon_points", result.in_balloon_count},
        {"classical_fraction_in_balloon", result.classical_fraction_in_balloon},
        {"target_nonclassical", is_nonclassical(spec.target)}};
  }
  write_json_output(config, "fig3_summary.json", summary);
}

void run_fig5(const RunConfig& config) {
  const StsParams target = cv_target(7);
  std::vector<double> thresholds = config.threshold > 0
                                       ? std::vector<double>{config.threshold}
                                       : std::vector<double>{0.90, 0.95};
  nlohmann::json summary;
  for (double threshold : thresholds) {
    BalloonSpec spec;
    spec.target = target;
    spec.f_threshold = threshold;
    const BalloonResult result = fidelity_balloon(spec, BalloonGridSpec{});
    std::ostringstream name;
    name << "fig5_threshold_" << threshold << ".csv";
    write_output(config, name.str(), io::balloon_csv(result));
    summary["threshold_" + std::to_string(threshold)] = {
        {"in_balloon_points", result.in_balloon_count},
        {"classical_fraction_in_balloon", result.classical_fraction_in_balloon}};
  }

  // where the bundled targets sit relative to the balloons
  const CovarianceMatrix2 target_cm = cm_from_params(target);
  std::string csv = "state,s,mu,fidelity_to_target,nonclassical\n";
  bool all_inside = true;
  double min_fidelity = 1.0;
  for (int state = 1; state <= 14; ++state) {
    const StsParams p = cv_target(state);
    const double f = gaussian_fidelity(cm_from_params(p), target_cm);
    min_fidelity = std::min(min_fidelity, f);
    all_inside = all_inside && f >= 0.90;
    csv += std::to_string(state) + "," + io::format_double(p.s) + "," +
           io::format_double(p.mu) + "," + io::format_double(f) + "," +
           (is_nonclassical(p) ? "1" : "0") + "\n";
  }
  write_output(config, "fig5_targets.csv", csv);
  summary["all_targets_above_0.90"] = all_inside;
  summary["min_target_fidelity"] = min_fidelity;
  write_json_output(config, "fig5_summary.json", summary);
}

struct DvRun {
  int state;
  double p_target;
  DensityMatrix4 target;
  DvReplicaEnsemble direct;
  DvReplicaEnsemble projected;
};

DvRun run_dv_state(const RunConfig& config, int state) {
  DvRun out;
  out.state = state;
  out.p_target = kDvTargets[static_cast<std::size_t>(state - 1)].p;
  out.target = werner(out.p_target);
  Rng base_rng(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(state)));
  const CountRecord base =
      simulate_counts(out.target, config.n_scale, base_rng,
                      config.noiseless ? CountNoise::None : CountNoise::Poisson);
  try {
    out.direct = dv_replicas(base, standard_projector_set(), config.n_mc,
                             derive_seed(config.seed, 2000 + static_cast<std::uint64_t>(state)),
                             config.noiseless ? 0.0 : config.noise_scale);
  } catch (const std::exception& ex) {
    throw NumericalError("state " + std::to_string(state) + ": " + ex.what());
  }
  out.projected = werner_projection_ensemble(out.direct);
  return out;
}

void run_table2(const RunConfig& config) {
  const auto states = resolve_states(config, 4, {1, 2, 3, 4});
  std::string csv =
      "state,p_target,p_mean,p_std,fidelity_mean,fidelity_p2.5,fidelity_p97.5,"
      "min_ppt_direct_mean,min_ppt_direct_std,min_ppt_projected_mean,"
      "min_ppt_projected_std,discord_direct_mean,discord_direct_std,"
      "discord_projected_mean,discord_projected_std,discord_analytic_target\n";
  nlohmann::json stats_json;
  for (int state : states) {
    const DvRun run = run_dv_state(config, state);
    const auto derived_direct = derive_dv_quantities(run.direct, run.target);
    const auto derived_projected =
        derive_dv_quantities(run.projected, run.target);
    const EnsembleStats direct = classify_ensemble(derived_direct);
    const EnsembleStats projected = classify_ensemble(derived_projected);
    write_output(config, "table2_state" + std::to_string(state) + "_replicas.csv",
                 io::dv_ensemble_csv(derived_direct));
    const auto& p_stats = direct.quantities.at("werner_p");
    const auto& f_stats = direct.quantities.at("fidelity_to_target");
    const auto& em_d = direct.quantities.at("min_ppt");
    const auto& em_p = projected.quantities.at("min_ppt");
    const auto& d_d = direct.quantities.at("discord");
    const auto& d_p = projected.quantities.at("discord");
    std::ostringstream row;
    row << state << ',' << io::format_double(run.p_target) << ','
        << io::format_double(p_stats.mean) << ','
        << io::format_double(p_stats.stddev) << ','
        << io::format_double(f_stats.mean) << ','
        << io::format_double(f_stats.p2_5) << ','
        << io::format_double(f_stats.p97_5) << ','
        << io::format_double(em_d.mean) << ','
        << io::format_double(em_d.stddev) << ','
        << io::format_double(em_p.mean) << ','
        << io::format_double(em_p.stddev) << ','
        << io::format_double(d_d.mean) << ','
        << io::format_double(d_d.stddev) << ','
        << io::format_double(d_p.mean) << ','
        << io::format_double(d_p.stddev) << ','
        << io::format_double(discord_analytic_werner(run.p_target)) << '\n';
    csv += row.str();
    const std::string key = "state" + std::to_string(state);
    stats_json[key]["direct"] = io::stats_to_json(direct);
    stats_json[key]["projected"] = io::stats_to_json(projected);
    stats_json[key]["fit_failures"] = run.direct.failures;
  }
  write_output(config, "table2.csv", csv);
  write_json_output(config, "table2_stats.json", stats_json);
}

void write_dv_scatter(const RunConfig& config, const std::string& prefix,
                      bool with_discord) {
  const auto states = resolve_states(config, 4, {1, 2, 3, 4});
  for (int state : states) {
    const DvRun run = run_dv_state(config, state);
    const auto direct = derive_dv_quantities(run.direct, run.target);
    const auto projected = derive_dv_quantities(run.projected, run.target);
    std::string csv =
        with_discord
            ? "replica,werner_p,discord_direct,discord_projected,"
              "fidelity_direct,fidelity_projected\n"
            : "replica,werner_p,min_ppt_direct,min_ppt_projected,"
              "fidelity_direct,fidelity_projected\n";
    for (std::size_t i = 0; i < direct.size(); ++i) {
      const double a = with_discord ? direct[i].discord : direct[i].min_ppt;
      const double b = with_discord ? projected[i].discord : projected[i].min_ppt;
      csv += std::to_string(i) + "," + io::format_double(direct[i].werner_p) +
             "," + io::format_double(a) + "," + io::format_double(b) + "," +
             io::format_double(direct[i].fidelity_to_target) + "," +
             io::format_double(projected[i].fidelity_to_target) + "\n";
    }
    write_output(config, prefix + "_state" + std::to_string(state) + ".csv", csv);
  }
}

void run_fig7(const RunConfig& config) {
  // most classical preparation (state 3) against the most entangled target
  const double p_base = kDvTargets[2].p;
  const double p_target = kDvTargets[3].p;
  Rng base_rng(derive_seed(config.seed, 1003));
  const CountRecord base =
      simulate_counts(werner(p_base), config.n_scale, base_rng,
                      config.noiseless ? CountNoise::None : CountNoise::Poisson);
  DvReplicaEnsemble ens;
  try {
    ens = dv_replicas(base, standard_projector_set(), config.n_mc,
                      derive_seed(config.seed, 2003),
                      config.noiseless ? 0.0 : config.noise_scale);
  } catch (const std::exception& ex) {
    throw NumericalError(ex.what());
  }
  const FidelityHistogram hist =
      fidelity_histogram(ens, werner(p_target), config.histogram_bins);

  std::string csv = "bin_lo,bin_hi,count,density\n";
  const double n = static_cast<double>(hist.fidelities.size());
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    const double width = hist.bin_edges[b + 1] - hist.bin_edges[b];
    csv += io::format_double(hist.bin_edges[b]) + "," +
           io::format_double(hist.bin_edges[b + 1]) + "," +
           std::to_string(hist.counts[b]) + "," +
           io::format_double(static_cast<double>(hist.counts[b]) / (n * width)) +
           "\n";
  }
  write_output(config, "fig7_hist.csv", csv);
  write_json_output(config, "fig7_summary.json",
                    {{"mean_fidelity", hist.mean},
                     {"mode", hist.mode},
                     {"beta_alpha", hist.fit.alpha},
                     {"beta_beta", hist.fit.beta},
                     {"beta_fitted", hist.fit.fitted},
                     {"support_min", hist.fit.support_min},
                     {"support_max", hist.fit.support_max},
                     {"p_base", p_base},
                     {"p_target", p_target}});
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  if (name == "table1") return Experiment::Table1;
  if (name == "fig2") return Experiment::Fig2;
  if (name == "fig3") return Experiment::Fig3;
  if (name == "fig5") return Experiment::Fig5;
  if (name == "table2") return Experiment::Table2;
  if (name == "fig4") return Experiment::Fig4;
  if (name == "fig6") return Experiment::Fig6;
  if (name == "fig7") return Experiment::Fig7;
  throw ConfigError("unknown experiment: " + name);
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Table1: return "table1";
    case Experiment::Fig2:   return "fig2";
    case Experiment::Fig3:   return "fig3";
    case Experiment::Fig5:   return "fig5";
    case Experiment::Table2: return "table2";
    case Experiment::Fig4:   return "fig4";
    case Experiment::Fig6:   return "fig6";
    case Experiment::Fig7:   return "fig7";
  }
  throw ConfigError("unknown experiment enum value");
}

RunConfig apply_overrides(RunConfig base, const nlohmann::json& overrides) {
  if (!overrides.is_object())
    throw ConfigError("config overrides must be a JSON object");
  try {
    for (const auto& [key, value] : overrides.items()) {
      if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "experiment") base.experiment = parse_experiment(value.get<std::string>());
      else if (key == "out") base.out_dir = value.get<std::string>();
      else if (key == "n_mc") base.n_mc = value.get<std::size_t>();
      else if (key == "m_samples") base.m_samples = value.get<std::size_t>();
      else if (key == "n_scale") base.n_scale = value.get<double>();
      else if (key == "threshold") base.threshold = value.get<double>();
      else if (key == "states") base.states = value.get<std::vector<int>>();
      else if (key == "noiseless") base.noiseless = value.get<bool>();
      else if (key == "noise_scale") base.noise_scale = value.get<double>();
      else if (key == "fit_n_s") base.fit_n_s = value.get<double>();
      else if (key == "histogram_bins") base.histogram_bins = value.get<int>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad config value: ") + ex.what());
  }
  return base;
}

std::uint64_t config_fingerprint(const RunConfig& config) {
  std::ostringstream text;
  text << "seed=" << config.seed << ";experiment=" << experiment_name(config.experiment)
       << ";n_mc=" << config.n_mc << ";m_samples=" << config.m_samples
       << ";n_scale=" << io::format_double(config.n_scale)
       << ";threshold=" << io::format_double(config.threshold) << ";states=";
  for (int s : config.states) text << s << '+';
  text << ";noiseless=" << config.noiseless
       << ";noise_scale=" << io::format_double(config.noise_scale)
       << ";fit_n_s=" << io::format_double(config.fit_n_s)
       << ";histogram_bins=" << config.histogram_bins;
  const std::string s = text.str();
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string header_line(const RunConfig& config) {
  std::ostringstream line;
  line << "# seed=" << config.seed
       << " experiment=" << experiment_name(config.experiment) << " config=0x"
       << std::hex << config_fingerprint(config);
  return line.str();
}

void run_experiment(const RunConfig& config) {
  if (config.n_mc < 1) throw ConfigError("n_mc must be >= 1");
  if (config.m_samples < 2) throw ConfigError("m_samples must be >= 2");
  if (!(config.n_scale > 0)) throw ConfigError("n_scale must be > 0");
  if (config.threshold != 0 &&
      !(config.threshold > 0 && config.threshold < 1))
    throw ConfigError("threshold must be in (0, 1)");
  if (config.histogram_bins < 5) throw ConfigError("histogram_bins must be >= 5");
  ensure_out_dir(config);

  switch (config.experiment) {
    case Experiment::Table1: run_table1(config); return;
    case Experiment::Fig2:   run_fig2(config); return;
    case Experiment::Fig3:   run_fig3(config); return;
    case Experiment::Fig5:   run_fig5(config); return;
    case Experiment::Table2: run_table2(config); return;
    case Experiment::Fig4:   write_dv_scatter(config, "fig4", false); return;
    case Experiment::Fig6:   write_dv_scatter(config, "fig6", true); return;
    case Experiment::Fig7:   run_fig7(config); return;
  }
  throw ConfigError("unknown experiment");
}

}  // namespace qst::cli
