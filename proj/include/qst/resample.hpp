// Monte Carlo replica engine and ensemble statistics: repeated synthetic
// reconstructions of one target, fidelity balloons, classification fractions
// and distribution summaries.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qst/cv_core.hpp"
#include "qst/dv_core.hpp"
#include "qst/homodyne.hpp"
#include "qst/mle.hpp"

namespace qst {

struct CvReplica {
  bool ok{false};
  StsParams params;
  CovarianceMatrix2 cm;          // reconstructed, cross term included
  double n_tot{0};
  double sigma_n_tot{0};
  std::string error;
};

struct CvReplicaEnsemble {
  std::string target_id;
  StsParams target;
  std::size_t m_samples{0};
  std::uint64_t seed{0};
  std::vector<CvReplica> replicas;
  std::size_t failures{0};
};

// One replica = fresh homodyne dataset (child seed i), covariance
// reconstruction, conversion back to (s, mu). Reconstruction failures are
// recorded per replica; only an all-failed ensemble throws.
CvReplicaEnsemble cv_replicas(const StsParams& target, std::size_t m_samples,
                              std::size_t n_mc, std::uint64_t seed,
                              std::string target_id = {});

struct DvReplicaEnsemble {
  std::string target_id;
  CountRecord base;
  std::uint64_t seed{0};
  double noise_scale{1.0};
  std::vector<DensityMatrix4> replicas;
  std::size_t failures{0};
};

// One replica = all 16 counts redrawn from Normal(n_j, noise_scale*sqrt(n_j))
// truncated at zero, then a maximum-likelihood fit. Throws if more than 1%
// of the fits fail.
DvReplicaEnsemble dv_replicas(const CountRecord& base,
                              const ProjectorSet& projectors, std::size_t n_mc,
                              std::uint64_t seed, double noise_scale = 1.0);

// Per-replica derived quantities of a DV ensemble.
struct DvReplicaDerived {
  double min_ppt{0};
  double discord{0};
  double fidelity_to_target{0};
  double werner_p{0};
  double werner_fidelity{0};
};

std::vector<DvReplicaDerived> derive_dv_quantities(const DvReplicaEnsemble& e,
                                                   const DensityMatrix4& target);

struct BalloonSpec {
  StsParams target;
  double f_threshold{0.9};
  // (expected energy, half-width) of the optional total-energy stripe
  std::optional<std::pair<double, double>> energy_window;
};

struct BalloonGridSpec {
  double s_min{0.2}, s_max{1.2};
  double mu_min{0.2}, mu_max{1.0};
  int n_s{300}, n_mu{300};
};

struct BalloonPoint {
  double s{0}, mu{0};
  double fidelity{0};
  bool in_balloon{false};
  bool in_stripe{false};
  bool nonclassical{false};
};

struct BalloonResult {
  BalloonSpec spec;
  BalloonGridSpec grid;
  std::vector<BalloonPoint> points;  // row-major, s fastest
  std::size_t in_balloon_count{0};
  double classical_fraction_in_balloon{0};
};

// Fidelity to the target and total energy for every lattice point of the
// (s, mu) plane.
BalloonResult fidelity_balloon(const BalloonSpec& spec,
                               const BalloonGridSpec& grid);

struct QuantityStats {
  double mean{0}, stddev{0};
  double p2_5{0}, p16{0}, p84{0}, p97_5{0};
};

struct EnsembleStats {
  std::size_t n{0};
  std::map<std::string, QuantityStats> quantities;
  std::map<std::string, double> fractions;
};

QuantityStats summarize(std::span<const double> values);

// CV quantities: s, mu, var_x, var_p, n_tot; fractions classical/nonclassical.
EnsembleStats classify_ensemble(const CvReplicaEnsemble& e);
// DV quantities: min_ppt, discord, fidelity_to_target, werner_p; fractions
// separable/entangled.
EnsembleStats classify_ensemble(const DvReplicaEnsemble& e,
                                const DensityMatrix4& target);
EnsembleStats classify_ensemble(std::span<const DvReplicaDerived> derived);

struct BetaFit {
  double alpha{0}, beta{0};
  double support_min{0}, support_max{1};
  bool fitted{false};
};

// Method-of-moments beta fit on values rescaled to their observed support.
BetaFit fit_beta_moments(std::span<const double> values);

struct FidelityHistogram {
  std::vector<double> fidelities;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  BetaFit fit;
  double mean{0};
  double mode{0};
};

FidelityHistogram fidelity_histogram(const DvReplicaEnsemble& e,
                                     const DensityMatrix4& target, int bins);

// Maps every replica to its closest Werner state (the fidelity-maximizing
// one) and materializes that state.
DvReplicaEnsemble werner_projection_ensemble(const DvReplicaEnsemble& e);

}  // namespace qst
