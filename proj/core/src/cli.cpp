// SPDX-License-Identifier: Apache-2.0
#include "driftbench/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "driftbench/serialize.hpp"
#include "driftbench/studies.hpp"

namespace driftbench {

namespace {

int run_simulate(const std::string& model_path, std::size_t n, double delta,
                 std::uint64_t seed, int substeps, double L0, bool allow_oor,
                 double x0, bool has_x0, const std::string& out,
                 const std::string& fine_out, const std::string& sidecar) {
  const ModelDescription desc = model_from_file(model_path);
  const Model model(desc.params());
  PathConfig config;
  config.n = n;
  config.Delta = delta;
  config.substeps = substeps;
  config.seed = seed;
  config.L0 = L0;
  if (has_x0) config.x0 = x0;
  if (!allow_oor && !config.regime_ok()) {
    std::cerr << "config violates the high-frequency regime (n Delta^2 log(1/Delta) = "
              << config.regime_statistic() << " > L0 = " << L0
              << " or n Delta < 1); pass --allow-out-of-regime to override\n";
    return 1;
  }
  const SamplePath path = simulate_path(model, config);
  const Observations obs = subsample(path, config);
  write_observations_csv(obs, out);
  if (!fine_out.empty())
    write_path_binary(path, config, fine_out,
                      sidecar.empty() ? fine_out + ".json" : sidecar);
  return 0;
}

int run_estimate(const std::string& obs_path, const std::string& config_path,
                 const std::string& out) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open estimator config: " + config_path);
  json cfg;
  in >> cfg;

  auto basis = std::make_shared<const WaveletBasis>(
      cfg.contains("basis") ? basis_from_json(cfg.at("basis")) : WaveletBasis::Options{});
  const Observations obs = read_observations_csv(obs_path);

  EstimatorConfig ec;
  ec.basis = basis.get();
  ec.K0 = cfg.value("K0", 1.0);
  const json rule = cfg.value("rule", json{{"type", "rate"}, {"s", 2.0}});
  if (rule.at("type") == "fixed") {
    ec.resolution = rule.at("level").get<int>();
  } else {
    RateSchedule schedule;
    schedule.s = rule.value("s", 2.0);
    schedule.L1 = rule.value("L1", 0.5);
    schedule.L2 = rule.value("L2", 1.0);
    ec.resolution = schedule;
  }
  const FitResult fit = fit_minimum_contrast(obs, ec);
  std::ofstream fout(out);
  if (!fout) throw std::runtime_error("cannot open for writing: " + out);
  fout << fit_to_json(fit).dump(2) << "\n";
  return 0;
}

int run_posterior(const std::string& obs_path, const std::string& config_path,
                  const std::string& out, const std::string& report_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open posterior config: " + config_path);
  json cfg;
  in >> cfg;

  auto basis = std::make_shared<const WaveletBasis>(
      cfg.contains("basis") ? basis_from_json(cfg.at("basis")) : WaveletBasis::Options{});
  const Observations obs = read_observations_csv(obs_path);
  const PriorSpec prior = prior_from_json(cfg.value("prior", json::object()));

  SigmaSpec sigma = SigmaSpec::constant(1.0);
  if (cfg.contains("sigma")) {
    json wrapper{{"drift", {{"type", "closed_form"}, {"terms", json::array()}}},
                 {"sigma", cfg.at("sigma")}};
    sigma = model_from_json(wrapper, basis).sigma;
  }

  MCMCConfig mc;
  mc.iters = cfg.value("iters", std::size_t{20000});
  mc.burnin = cfg.value("burnin", std::size_t{5000});
  mc.step_scale = cfg.value("step_scale", 0.3);
  mc.seed = cfg.value("seed", std::uint64_t{1});
  mc.thin = cfg.value("thin", 1);
  mc.level_move_prob = cfg.value("level_move_prob", 0.2);

  const PosteriorChain chain = run_mcmc(prior, obs, mc, *basis, sigma);
  write_chain_jsonl(chain, out);
  if (!report_path.empty()) {
    json rep{{"draws", chain.draws.size()},
             {"within_acceptance", chain.within_rate()},
             {"level_acceptance", chain.level_rate()},
             {"step_scale_final", chain.step_scale_final},
             {"seed", chain.seed}};
    std::ofstream rout(report_path);
    rout << rep.dump(2) << "\n";
  }
  return 0;
}

int run_study_cmd(const std::string& name, const std::string& config_path,
                  const std::string& out_dir, bool plots) {
  StudyConfig config = StudyConfig::from_file(config_path);
  if (!name.empty()) config.study = name;
  if (!out_dir.empty()) config.out_dir = out_dir;
  const StudyReport report = run_study(config);
  std::string dir = config.out_dir.empty() ? "." : config.out_dir;
  std::filesystem::create_directories(dir);
  report.save(dir + "/report.json");
  if (plots) write_study_plots(report, dir);
  for (const auto& v : report.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
  std::cout << "report written to " << dir << "/report.json\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"driftbench: scalar periodic diffusion drift estimation bench"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate observations to CSV");
  std::string sim_model, sim_out, sim_fine, sim_sidecar;
  std::size_t sim_n = 1024;
  double sim_delta = 0.01, sim_L0 = 10.0, sim_x0 = 0.0;
  std::uint64_t sim_seed = 1;
  int sim_substeps = 50;
  bool sim_allow = false;
  bool sim_has_x0 = false;
  sim->add_option("--config", sim_model, "model description JSON")->required();
  sim->add_option("--n", sim_n, "number of increments");
  sim->add_option("--delta", sim_delta, "sampling step Delta");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--substeps", sim_substeps, "fine Euler steps per Delta");
  sim->add_option("--L0", sim_L0, "regime budget");
  sim->add_flag("--allow-out-of-regime", sim_allow, "skip the regime guard");
  auto* x0opt = sim->add_option("--x0", sim_x0, "fixed start (default: X0 ~ mu_b)");
  sim->add_option("--out", sim_out, "observations CSV path")->required();
  sim->add_option("--fine-out", sim_fine, "fine path binary (float64 LE)");
  sim->add_option("--sidecar", sim_sidecar, "sidecar JSON for --fine-out");

  // estimate
  auto* est = app.add_subcommand("estimate", "fit the minimum-contrast estimator");
  std::string est_obs, est_cfg, est_out;
  est->add_option("--obs", est_obs, "observations CSV")->required();
  est->add_option("--config", est_cfg, "estimator config JSON")->required();
  est->add_option("--out", est_out, "fit result JSON")->required();

  // posterior
  auto* post = app.add_subcommand("posterior", "run MCMC posterior sampling");
  std::string post_obs, post_cfg, post_out, post_report;
  post->add_option("--obs", post_obs, "observations CSV")->required();
  post->add_option("--config", post_cfg, "posterior config JSON")->required();
  post->add_option("--out", post_out, "chain JSONL path")->required();
  post->add_option("--report", post_report, "summary JSON path");

  // study
  auto* study = app.add_subcommand("study", "run a Monte-Carlo study");
  std::string study_name, study_cfg, study_out;
  bool study_plots = false;
  study->add_option("name", study_name, "rate|contraction|klcheck|holder|smallball");
  study->add_option("--config", study_cfg, "study config JSON")->required();
  study->add_option("--out-dir", study_out, "output directory");
  study->add_flag("--plots", study_plots, "emit SVG plots");

  std::vector<std::string> argv_storage = args;
  std::vector<const char*> argv;
  argv.push_back("driftbench");
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed())
      return run_simulate(sim_model, sim_n, sim_delta, sim_seed, sim_substeps, sim_L0,
                          sim_allow, sim_x0, x0opt->count() > 0 || sim_has_x0, sim_out,
                          sim_fine, sim_sidecar);
    if (est->parsed()) return run_estimate(est_obs, est_cfg, est_out);
    if (post->parsed()) return run_posterior(post_obs, post_cfg, post_out, post_report);
    if (study->parsed()) return run_study_cmd(study_name, study_cfg, study_out, study_plots);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace driftbench
