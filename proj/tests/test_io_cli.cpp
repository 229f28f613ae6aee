#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "qst/cli.hpp"
#include "qst/io.hpp"
#include "qst/resample.hpp"

using namespace qst;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qst_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("homodyne dataset round-trips bit-exactly") {
  const fs::path dir = fresh_dir("homodyne_csv");
  const HomodyneDataset ds = simulate_homodyne(
      StsParams{0.41, 0.53}, 500, PhaseSchedule::UniformRandom, 99u);
  io::write_homodyne_csv(dir / "data.csv", ds);
  const HomodyneDataset back = io::read_homodyne_csv(dir / "data.csv");
  REQUIRE(back.size() == ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    CHECK(back.theta[k] == ds.theta[k]);
    CHECK(back.x[k] == ds.x[k]);
  }
  CHECK(back.meta.seed == 99u);
  CHECK(back.meta.schedule == PhaseSchedule::UniformRandom);
  CHECK(back.meta.params.s == ds.meta.params.s);
  CHECK(back.meta.params.mu == ds.meta.params.mu);
}

TEST_CASE("count record round-trips and validates labels") {
  const fs::path dir = fresh_dir("counts_csv");
  const ProjectorSet& ps = standard_projector_set();
  Rng rng(3);
  const CountRecord counts = simulate_counts(werner(0.44), 800.0, rng);
  io::write_count_record_csv(dir / "counts.csv", counts, ps);
  const CountRecord back = io::read_count_record_csv(dir / "counts.csv", ps);
  CHECK(back.counts == counts.counts);

  auto text = io::read_text_file(dir / "counts.csv");
  text.replace(text.find("HV"), 2, "XY");
  io::write_text_file(dir / "bad.csv", text);
  CHECK_THROWS(io::read_count_record_csv(dir / "bad.csv", ps));
}

TEST_CASE("density matrix json enforces the invariants") {
  const DensityMatrix4 rho = werner(0.37);
  const nlohmann::json j = io::density_matrix_to_json(rho);
  const DensityMatrix4 back = io::density_matrix_from_json(j);
  CHECK((back - rho).cwiseAbs().maxCoeff() < 1e-15);

  nlohmann::json corrupted = j;
  corrupted["re"][0][0] = 0.9;  // breaks unit trace
  CHECK_THROWS(io::density_matrix_from_json(corrupted));
}

TEST_CASE("fit report json") {
  const ProjectorSet& ps = standard_projector_set();
  Rng rng(41);
  const CountRecord counts = simulate_counts(werner(0.44), 1500.0, rng);
  const MleResult fit = mle_fit(counts, ps);
  const nlohmann::json report = io::fit_report_json(fit, ps, 41u);
  CHECK(report["projector_set"] == "canonical-16");
  CHECK(report["seed"] == 41u);
  CHECK(report["converged"] == true);
  const DensityMatrix4 state = io::density_matrix_from_json(report["state"]);
  CHECK((state - fit.rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("experiment names and overrides") {
  CHECK(cli::parse_experiment("table1") == cli::Experiment::Table1);
  CHECK(cli::parse_experiment("fig7") == cli::Experiment::Fig7);
  CHECK_THROWS_AS(cli::parse_experiment("fig1"), cli::ConfigError);

  cli::RunConfig base;
  const nlohmann::json overrides = {
      {"seed", 77}, {"n_mc", 5}, {"experiment", "fig2"}, {"noiseless", true}};
  const cli::RunConfig merged = cli::apply_overrides(base, overrides);
  CHECK(merged.seed == 77);
  CHECK(merged.n_mc == 5);
  CHECK(merged.experiment == cli::Experiment::Fig2);
  CHECK(merged.noiseless);

  CHECK_THROWS_AS(cli::apply_overrides(base, {{"bogus", 1}}), cli::ConfigError);
  CHECK_THROWS_AS(cli::apply_overrides(base, nlohmann::json::array()),
                  cli::ConfigError);
}

TEST_CASE("config validation") {
  cli::RunConfig config;
  config.out_dir = fresh_dir("validation");
  config.threshold = 1.5;
  CHECK_THROWS_AS(cli::run_experiment(config), cli::ConfigError);
  config.threshold = 0;
  config.n_mc = 0;
  CHECK_THROWS_AS(cli::run_experiment(config), cli::ConfigError);
  config.n_mc = 10;
  config.states = {15};
  CHECK_THROWS_AS(cli::run_experiment(config), cli::ConfigError);
}

TEST_CASE("table1 runs are deterministic byte for byte") {
  cli::RunConfig config;
  config.experiment = cli::Experiment::Table1;
  config.seed = 5;
  config.m_samples = 1000;
  config.states = {7};

  config.out_dir = fresh_dir("table1_a");
  cli::run_experiment(config);
  const std::string first = io::read_text_file(config.out_dir / "table1.csv");

  config.out_dir = fresh_dir("table1_b");
  cli::run_experiment(config);
  const std::string second = io::read_text_file(config.out_dir / "table1.csv");

  CHECK(first == second);
  CHECK(first.rfind("# seed=5 experiment=table1", 0) == 0);

  // single-state selection produces exactly one data row
  CHECK(std::count(first.begin(), first.end(), '\n') == 3);  // header comment, header, row
}

TEST_CASE("noiseless variance-fit run recovers the configured n_s") {
  cli::RunConfig config;
  config.experiment = cli::Experiment::Fig2;
  config.noiseless = true;
  config.fit_n_s = 0.2122;
  config.out_dir = fresh_dir("fig2");
  cli::run_experiment(config);
  const nlohmann::json summary = nlohmann::json::parse(
      io::read_text_file(config.out_dir / "fig2_summary.json"));
  CHECK(summary["n_s"].get<double>() == doctest::Approx(0.2122).epsilon(1e-7));

  // a different override propagates into the recovered value
  config.fit_n_s = 0.17;
  config.out_dir = fresh_dir("fig2_b");
  cli::run_experiment(config);
  const nlohmann::json other = nlohmann::json::parse(
      io::read_text_file(config.out_dir / "fig2_summary.json"));
  CHECK(other["n_s"].get<double>() == doctest::Approx(0.17).epsilon(1e-7));
}

TEST_CASE("balloon exhibit writes the region files") {
  cli::RunConfig config;
  config.experiment = cli::Experiment::Fig3;
  config.states = {7};
  config.out_dir = fresh_dir("fig3");
  cli::run_experiment(config);
  const std::string csv =
      io::read_text_file(config.out_dir / "fig3_state7.csv");
  CHECK(csv.find("s,mu,fidelity,in_balloon,in_stripe,nonclassical") !=
        std::string::npos);

  config.experiment = cli::Experiment::Fig5;
  config.states.clear();
  config.out_dir = fresh_dir("fig5");
  cli::run_experiment(config);
  CHECK(fs::exists(config.out_dir / "fig5_threshold_0.9.csv"));
  CHECK(fs::exists(config.out_dir / "fig5_threshold_0.95.csv"));
  const nlohmann::json summary = nlohmann::json::parse(
      io::read_text_file(config.out_dir / "fig5_summary.json"));
  CHECK(summary["all_targets_above_0.90"] == true);
}

TEST_CASE("dv pipeline smoke runs are deterministic") {
  cli::RunConfig config;
  config.experiment = cli::Experiment::Table2;
  config.seed = 9;
  config.n_mc = 4;
  config.n_scale = 600;
  config.states = {4};

  config.out_dir = fresh_dir("table2_a");
  cli::run_experiment(config);
  const std::string first = io::read_text_file(config.out_dir / "table2.csv");
  config.out_dir = fresh_dir("table2_b");
  cli::run_experiment(config);
  CHECK(io::read_text_file(config.out_dir / "table2.csv") == first);

  config.experiment = cli::Experiment::Fig7;
  config.histogram_bins = 6;
  config.out_dir = fresh_dir("fig7");
  cli::run_experiment(config);
  CHECK(fs::exists(config.out_dir / "fig7_hist.csv"));
  const nlohmann::json summary = nlohmann::json::parse(
      io::read_text_file(config.out_dir / "fig7_summary.json"));
  CHECK(summary["mean_fidelity"].get<double>() > 0.8);

  config.experiment = cli::Experiment::Fig4;
  config.out_dir = fresh_dir("fig4");
  cli::run_experiment(config);
  CHECK(fs::exists(config.out_dir / "fig4_state4.csv"));
}

TEST_CASE("ensemble csv writers") {
  const CvReplicaEnsemble cv = cv_replicas(StsParams{0.41, 0.53}, 2000, 5, 61u);
  const std::string cv_csv = io::cv_ensemble_csv(cv);
  CHECK(cv_csv.rfind("replica_id,ok,s,mu,var_x,var_p,n_tot,nonclassical", 0) == 0);
  CHECK(std::count(cv_csv.begin(), cv_csv.end(), '\n') == 6);

  Rng rng(63);
  const CountRecord base = simulate_counts(werner(0.44), 900.0, rng);
  const DvReplicaEnsemble dv =
      dv_replicas(base, standard_projector_set(), 5, 65u);
  const std::string dv_csv = io::dv_ensemble_csv(dv, werner(0.44));
  CHECK(dv_csv.rfind("replica_id,min_ppt,discord,fidelity_to_target,werner_p",
                     0) == 0);
  CHECK(std::count(dv_csv.begin(), dv_csv.end(), '\n') == 6);
}

TEST_CASE("binary exit codes") {
  const fs::path dir = fresh_dir("exit_codes");
  const std::string cli = QST_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("--experiment table1 --out " + (dir / "ok").string() +
            " --states 7 --m-samples 500 --seed 3") == 0);
  CHECK(run("--experiment fig1 --out " + (dir / "bad").string()) == 2);
  CHECK(run("--out " + (dir / "none").string()) == 2);
  // vanishing count rate: every replica fit fails, a numerical error
  CHECK(run("--experiment fig7 --n-scale 0.001 --n-mc 4 --seed 1 --out " +
            (dir / "numfail").string()) == 3);

  // a config file overrides the flags it names
  io::write_text_file(dir / "cfg.json",
                      "{\"experiment\": \"fig2\", \"noiseless\": true}");
  CHECK(run("--experiment table1 --out " + (dir / "cfg_out").string() +
            " --config " + (dir / "cfg.json").string()) == 0);
  CHECK(fs::exists(dir / "cfg_out" / "fig2_summary.json"));
}
