// File formats: homodyne dataset CSV (+ JSON sidecar), count-record CSV,
// density-matrix JSON, fit reports and the CSV/JSON writers used by the CLI.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qst/homodyne.hpp"
#include "qst/mle.hpp"
#include "qst/resample.hpp"

namespace qst::io {

// shortest text form that round-trips an IEEE double (17 significant digits)
std::string format_double(double value);

// CSV `theta,x` plus a `<path>.json` sidecar carrying seed, parameters and
// schedule. Round-trips bit-exactly.
void write_homodyne_csv(const std::filesystem::path& path,
                        const HomodyneDataset& ds);
HomodyneDataset read_homodyne_csv(const std::filesystem::path& path);

// CSV `label,count`, one of the 16 projectors per row, in projector-set order.
void write_count_record_csv(const std::filesystem::path& path,
                            const CountRecord& counts,
                            const ProjectorSet& projectors);
CountRecord read_count_record_csv(const std::filesystem::path& path,
                                  const ProjectorSet& projectors);

// {"re": [[..] x4], "im": [[..] x4]}, row-major; the reader enforces the
// density-matrix invariants.
nlohmann::json density_matrix_to_json(const DensityMatrix4& rho);
DensityMatrix4 density_matrix_from_json(const nlohmann::json& j);

nlohmann::json fit_report_json(const MleResult& result,
                               const ProjectorSet& projectors,
                               std::uint64_t seed);

nlohmann::json stats_to_json(const EnsembleStats& stats);

// One row per replica with its derived quantities.
std::string cv_ensemble_csv(const CvReplicaEnsemble& ensemble);
std::string dv_ensemble_csv(std::span<const DvReplicaDerived> derived);
std::string dv_ensemble_csv(const DvReplicaEnsemble& ensemble,
                            const DensityMatrix4& target);

// `s,mu,fidelity,in_balloon,in_stripe,nonclassical`, one lattice point per row.
std::string balloon_csv(const BalloonResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qst::io
