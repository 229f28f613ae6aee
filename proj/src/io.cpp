#include "qst/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qst::io {

namespace {

PhaseSchedule schedule_from_name(const std::string& name) {
  if (name == "linear-ramp") return PhaseSchedule::LinearRamp;
  if (name == "uniform-random") return PhaseSchedule::UniformRandom;
  throw std::runtime_error("unknown phase schedule: " + name);
}

std::string schedule_name(PhaseSchedule schedule) {
  return schedule == PhaseSchedule::LinearRamp ? "linear-ramp" : "uniform-random";
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_homodyne_csv(const std::filesystem::path& path,
                        const HomodyneDataset& ds) {
  std::string text = "theta,x\n";
  for (std::size_t k = 0; k < ds.size(); ++k) {
    text += format_double(ds.theta[k]);
    text += ',';
    text += format_double(ds.x[k]);
    text += '\n';
  }
  write_text_file(path, text);

  nlohmann::json meta;
  meta["m"] = ds.size();
  meta["schedule"] = schedule_name(ds.meta.schedule);
  meta["params"] = {{"s", ds.meta.params.s}, {"mu", ds.meta.params.mu}};
  if (ds.meta.seed) meta["seed"] = *ds.meta.seed;
  write_text_file(sidecar_path(path), meta.dump(2) + "\n");
}

HomodyneDataset read_homodyne_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "theta,x")
    throw std::runtime_error("homodyne CSV: missing `theta,x` header in " +
                             path.string());
  HomodyneDataset ds;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("homodyne CSV: malformed row: " + line);
    ds.theta.push_back(std::stod(line.substr(0, comma)));
    ds.x.push_back(std::stod(line.substr(comma + 1)));
  }
  const auto sidecar = sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    const nlohmann::json meta = nlohmann::json::parse(read_text_file(sidecar));
    ds.meta.schedule = schedule_from_name(meta.at("schedule").get<std::string>());
    ds.meta.params.s = meta.at("params").at("s").get<double>();
    ds.meta.params.mu = meta.at("params").at("mu").get<double>();
    if (meta.contains("seed")) ds.meta.seed = meta["seed"].get<std::uint64_t>();
  }
  return ds;
}

void write_count_record_csv(const std::filesystem::path& path,
                            const CountRecord& counts,
                            const ProjectorSet& projectors) {
  std::string text = "label,count\n";
  for (int j = 0; j < 16; ++j) {
    text += projectors.labels[j];
    text += ',';
    text += format_double(counts.counts[j]);
    text += '\n';
  }
  write_text_file(path, text);
}

CountRecord read_count_record_csv(const std::filesystem::path& path,
                                  const ProjectorSet& projectors) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "label,count")
    throw std::runtime_error("count CSV: missing `label,count` header in " +
                             path.string());
  CountRecord out;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= 16) throw std::runtime_error("count CSV: more than 16 rows");
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("count CSV: malformed row: " + line);
    const std::string label = line.substr(0, comma);
    if (label != projectors.labels[row])
      throw std::runtime_error("count CSV: row " + std::to_string(row) +
                               " expected label " + projectors.labels[row] +
                               ", got " + label);
    out.counts[row] = std::stod(line.substr(comma + 1));
    ++row;
  }
  if (row != 16) throw std::runtime_error("count CSV: expected 16 rows");
  return out;
}

nlohmann::json density_matrix_to_json(const DensityMatrix4& rho) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) {
      re_row.push_back(rho(i, j).real());
      im_row.push_back(rho(i, j).imag());
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  return {{"re", re}, {"im", im}};
}

DensityMatrix4 density_matrix_from_json(const nlohmann::json& j) {
  DensityMatrix4 rho;
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != 4 || im.size() != 4)
    throw std::runtime_error("density matrix JSON: need 4x4 re and im arrays");
  for (int r = 0; r < 4; ++r) {
    if (re[r].size() != 4 || im[r].size() != 4)
      throw std::runtime_error("density matrix JSON: need 4x4 re and im arrays");
    for (int c = 0; c < 4; ++c)
      rho(r, c) = std::complex<double>(re[r][c].get<double>(),
                                       im[r][c].get<double>());
  }
  require_density_matrix(rho);
  return rho;
}

nlohmann::json fit_report_json(const MleResult& result,
                               const ProjectorSet& projectors,
                               std::uint64_t seed) {
  nlohmann::json j;
  j["state"] = density_matrix_to_json(result.rho);
  j["likelihood"] = result.diagnostics.final_likelihood;
  j["iterations"] = result.diagnostics.iterations;
  j["restarts_used"] = result.diagnostics.restarts_used;
  j["converged"] = result.diagnostics.converged;
  j["projector_set"] = projectors.id;
  j["seed"] = seed;
  return j;
}

nlohmann::json stats_to_json(const EnsembleStats& stats) {
  nlohmann::json j;
  j["n"] = stats.n;
  for (const auto& [name, q] : stats.quantities) {
    j["quantities"][name] = {{"mean", q.mean},   {"stddev", q.stddev},
                             {"p2.5", q.p2_5},   {"p16", q.p16},
                             {"p84", q.p84},     {"p97.5", q.p97_5}};
  }
  for (const auto& [name, f] : stats.fractions) j["fractions"][name] = f;
  return j;
}

std::string cv_ensemble_csv(const CvReplicaEnsemble& ensemble) {
  std::string csv = "replica_id,ok,s,mu,var_x,var_p,n_tot,nonclassical\n";
  for (std::size_t i = 0; i < ensemble.replicas.size(); ++i) {
    const CvReplica& rep = ensemble.replicas[i];
    csv += std::to_string(i) + ',';
    if (rep.ok) {
      csv += "1," + format_double(rep.params.s) + ',' +
             format_double(rep.params.mu) + ',' + format_double(rep.cm.var_x) +
             ',' + format_double(rep.cm.var_p) + ',' +
             format_double(rep.n_tot) + ',' +
             (is_nonclassical(rep.params) ? "1" : "0") + '\n';
    } else {
      csv += "0,,,,,,\n";
    }
  }
  return csv;
}

std::string dv_ensemble_csv(std::span<const DvReplicaDerived> derived) {
  std::string csv =
      "replica_id,min_ppt,discord,fidelity_to_target,werner_p,werner_fidelity\n";
  for (std::size_t i = 0; i < derived.size(); ++i) {
    const DvReplicaDerived& d = derived[i];
    csv += std::to_string(i) + ',' + format_double(d.min_ppt) + ',' +
           format_double(d.discord) + ',' + format_double(d.fidelity_to_target) +
           ',' + format_double(d.werner_p) + ',' +
           format_double(d.werner_fidelity) + '\n';
  }
  return csv;
}

std::string dv_ensemble_csv(const DvReplicaEnsemble& ensemble,
                            const DensityMatrix4& target) {
  return dv_ensemble_csv(derive_dv_quantities(ensemble, target));
}

std::string balloon_csv(const BalloonResult& result) {
  std::string csv = "s,mu,fidelity,in_balloon,in_stripe,nonclassical\n";
  for (const BalloonPoint& pt : result.points) {
    csv += format_double(pt.s) + "," + format_double(pt.mu) + "," +
           format_double(pt.fidelity) + "," + (pt.in_balloon ? "1" : "0") +
           "," + (pt.in_stripe ? "1" : "0") + "," +
           (pt.nonclassical ? "1" : "0") + "\n";
  }
  return csv;
}

}  // namespace qst::io
