// SPDX-License-Identifier: Apache-2.0
#include "driftbench/studies.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include "driftbench/pool.hpp"
#include "driftbench/stats.hpp"
#include "driftbench/svg.hpp"

namespace driftbench {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

json default_model() {
  // b0(x) = pi cos(2 pi x), sigma = 1: smooth, I_b(1) = 0, closed-form pi_0.
  return json{{"drift",
               {{"type", "closed_form"},
                {"terms", json::array({{{"kind", "cos"}, {"k", 1}, {"a", M_PI}}})}}},
              {"sigma", {{"type", "constant"}, {"value", 1.0}}}};
}

std::shared_ptr<const WaveletBasis> make_basis(const json& raw) {
  WaveletBasis::Options opts;
  if (raw.contains("basis")) opts = basis_from_json(raw.at("basis"));
  return std::make_shared<const WaveletBasis>(opts);
}

void check_regime(const StudyConfig& config, const PathConfig& path_cfg) {
  if (config.allow_out_of_regime) return;
  if (!path_cfg.regime_ok())
    throw std::invalid_argument(
        "study config violates the high-frequency regime n Delta^2 log(1/Delta) <= L0 "
        "(n=" + std::to_string(path_cfg.n) + ", Delta=" + std::to_string(path_cfg.Delta) +
        "); pass allow_out_of_regime to override");
}

}  // namespace

StudyConfig StudyConfig::from_json(const json& j) {
  StudyConfig c;
  c.study = j.value("study", "rate");
  c.model = j.contains("model") ? j.at("model") : default_model();
  if (j.contains("n_grid"))
    for (const auto& v : j.at("n_grid")) c.n_grid.push_back(v.get<std::size_t>());
  const std::string rule = j.value("delta_rule", "n^(-0.6)");
  if (rule.rfind("n^(-", 0) == 0 && rule.back() == ')') {
    c.delta_exponent = std::stod(rule.substr(4, rule.size() - 5));
  } else {
    throw std::invalid_argument("delta_rule must have the form n^(-a)");
  }
  if (!(c.delta_exponent > 0.5 && c.delta_exponent < 1.0) && !j.value("allow_out_of_regime", false))
    throw std::invalid_argument("delta_rule exponent must lie in (0.5, 1)");
  c.reps = j.value("reps", std::size_t{20});
  c.seed = j.value("seed", std::uint64_t{1});
  c.out_dir = j.value("out_dir", "");
  c.L0 = j.value("L0", 10.0);
  c.allow_out_of_regime = j.value("allow_out_of_regime", false);
  c.threads = j.value("threads", 0u);
  for (std::size_t i = 1; i < c.n_grid.size(); ++i)
    if (c.n_grid[i] <= c.n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");
  c.raw = j;
  return c;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open study config: " + path);
  json j;
  in >> j;
  return from_json(j);
}

json StudyReport::to_json() const {
  json v = json::array();
  for (const auto& verdict : verdicts)
    v.push_back({{"name", verdict.name}, {"pass", verdict.pass}, {"detail", verdict.detail}});
  return json{{"study", study},
              {"cells", cells},
              {"verdicts", v},
              {"extras", extras},
              {"runtime_seconds", runtime_seconds}};
}

bool StudyReport::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

void StudyReport::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Rate study
// ---------------------------------------------------------------------------

StudyReport run_rate_study(const StudyConfig& config) {
  const auto t0 = clock_type::now();
  StudyReport report;
  report.study = "rate";

  auto basis = make_basis(config.raw);
  const ModelDescription desc = model_from_json(config.model, basis);
  const bool zero_bias = config.raw.value("control", "") == "zero_bias";

  // Zero-bias control: the truth is its own projection onto S_2 and the
  // estimator runs at that fixed level, so the regression has no bias term.
  const int control_level = config.raw.value("control_level", 2);
  DriftSpec truth = desc.drift;
  if (zero_bias) {
    const CoefficientVector c0 = analyze(desc.drift.f, control_level, *basis);
    PeriodicFunction f([basis, c0](double x) { return synthesize_at(c0, *basis, x); });
    truth = DriftSpec::from_function(f, desc.drift.K0);
  }
  const Model model(ModelParams{truth, desc.sigma, desc.s, desc.A0});

  const int max_level = basis->max_level();
  const CoefficientVector c_truth = analyze(truth.f, max_level, *basis);
  const double tail_truth = l2_distance(synthesize(c_truth, *basis), truth.f);

  RateSchedule schedule;
  schedule.s = config.raw.value("s", 2.0);
  schedule.L1 = config.raw.value("L1", 0.5);
  schedule.L2 = config.raw.value("L2", 1.0);
  const int substeps = config.raw.value("substeps", 50);
  const double K0 = truth.K0;

  struct Cell {
    std::vector<double> errors;
    std::vector<int> levels;
    std::size_t constraint_hits = 0, failures = 0;
    double delta = 0.0;
    std::size_t n = 0;
  };
  std::vector<Cell> cellv(config.n_grid.size());

  const std::size_t reps = config.reps;
  std::vector<double> all_errors(config.n_grid.size() * reps, -1.0);
  std::vector<int> all_levels(config.n_grid.size() * reps, -1);
  std::vector<int> all_flags(config.n_grid.size() * reps, 0);  // 1=constraint, 2=failure

  for (std::size_t ci = 0; ci < config.n_grid.size(); ++ci) {
    cellv[ci].n = config.n_grid[ci];
    cellv[ci].delta = std::pow(static_cast<double>(config.n_grid[ci]), -config.delta_exponent);
    PathConfig probe;
    probe.n = cellv[ci].n;
    probe.Delta = cellv[ci].delta;
    probe.L0 = config.L0;
    check_regime(config, probe);
  }

  parallel_for_indexed(
      config.n_grid.size() * reps,
      [&](std::size_t task) {
        const std::size_t ci = task / reps;
        const std::size_t r = task % reps;
        PathConfig pc;
        pc.n = config.n_grid[ci];
        pc.Delta = cellv[ci].delta;
        pc.substeps = substeps;
        pc.seed = config.seed + r + 7919 * ci;
        pc.L0 = config.L0;
        try {
          const SamplePath path = simulate_path(model, pc);
          const Observations obs = subsample(path, pc);
          EstimatorConfig ec;
          if (zero_bias) {
            ec.resolution = control_level;
          } else {
            ec.resolution = schedule;
          }
          ec.K0 = K0;
          ec.basis = basis.get();
          const FitResult fit = fit_minimum_contrast(obs, ec);
          const double err =
              std::sqrt(std::pow(coeff_l2_distance(fit.coeffs, c_truth), 2) +
                        tail_truth * tail_truth);
          all_errors[task] = err;
          all_levels[task] = fit.level;
          if (fit.constraint_active) all_flags[task] = 1;
        } catch (const std::exception&) {
          all_flags[task] = 2;  // cell keeps running; failure recorded
        }
      },
      config.threads);

  for (std::size_t ci = 0; ci < config.n_grid.size(); ++ci)
    for (std::size_t r = 0; r < reps; ++r) {
      const std::size_t task = ci * reps + r;
      if (all_flags[task] == 2) {
        ++cellv[ci].failures;
        continue;
      }
      cellv[ci].errors.push_back(all_errors[task]);
      cellv[ci].levels.push_back(all_levels[task]);
      if (all_flags[task] == 1) ++cellv[ci].constraint_hits;
    }

  std::vector<double> log_nd, log_err;
  for (const auto& cell : cellv) {
    json row;
    row["n"] = cell.n;
    row["Delta"] = cell.delta;
    row["n_Delta"] = static_cast<double>(cell.n) * cell.delta;
    row["reps_ok"] = cell.errors.size();
    row["failures"] = cell.failures;
    row["constraint_hits"] = cell.constraint_hits;
    if (!cell.errors.empty()) {
      RunningStats st;
      for (double e : cell.errors) st.add(e);
      row["median_error"] = median(cell.errors);
      row["q25"] = quantile(cell.errors, 0.25);
      row["q75"] = quantile(cell.errors, 0.75);
      row["mean_error"] = st.mean();
      row["mean_error_se"] = st.mean_se();
      row["level"] = cell.levels.front();
      log_nd.push_back(std::log(static_cast<double>(cell.n) * cell.delta));
      log_err.push_back(std::log(median(cell.errors)));
    }
    report.cells.push_back(row);
  }

  if (log_nd.size() >= 2 && reps >= 2) {
    const SlopeFit fit = ols_slope(log_nd, log_err);
    report.extras["slope"] = fit.slope;
    report.extras["slope_se"] = fit.slope_se;
    report.extras["slope_ci"] = {fit.slope - 2.0 * fit.slope_se,
                                 fit.slope + 2.0 * fit.slope_se};
    const double target = zero_bias ? -0.5 : -schedule.s / (1.0 + 2.0 * schedule.s);
    report.extras["target_slope"] = target;
    const double window = config.raw.value("slope_window", 0.12);
    Verdict v;
    v.name = zero_bias ? "rate_slope_zero_bias" : "rate_slope";
    v.pass = std::abs(fit.slope - target) <= window;
    v.detail = "slope " + std::to_string(fit.slope) + " target " + std::to_string(target) +
               " +- " + std::to_string(window);
    report.verdicts.push_back(v);
  } else {
    report.extras["flag"] = "insufficient grid";
    report.verdicts.push_back({"rate_grid", true, "insufficient grid: no regression"});
  }

  report.runtime_seconds = seconds_since(t0);
  return report;
}

// ---------------------------------------------------------------------------
// Contraction study
// ---------------------------------------------------------------------------

StudyReport run_contraction_study(const StudyConfig& config) {
  const auto t0 = clock_type::now();
  StudyReport report;
  report.study = "contraction";

  auto basis = make_basis(config.raw);
  const ModelDescription desc = model_from_json(config.model, basis);
  const Model model(ModelParams{desc.drift, desc.sigma, desc.s, desc.A0});

  PriorSpec prior = config.raw.contains("prior")
                        ? prior_from_json(config.raw.at("prior"))
                        : PriorSpec::sieve_prior(2.0, QKind::truncated_gaussian, 5);

  MCMCConfig mcfg;
  mcfg.iters = config.raw.value("iters", std::size_t{30000});
  mcfg.burnin = config.raw.value("burnin", std::size_t{10000});
  mcfg.thin = config.raw.value("thin", 5);
  mcfg.level_move_prob = config.raw.value("level_move_prob", 0.2);
  const double s = config.raw.value("s", 2.0);
  const int substeps = config.raw.value("substeps", 50);
  const std::size_t chains = config.raw.value("chains", std::size_t{3});
  const int m_cap = prior.level_cap;

  struct CellOut {
    std::vector<std::vector<double>> distances;  // per chain: posterior distances
    std::vector<double> post_mean_err;
    std::vector<double> level_hist;  // pooled draw counts per resolution
    std::size_t aborted = 0;
    double eps_n = 0.0;
    double delta = 0.0;
  };
  std::vector<CellOut> cells(config.n_grid.size());
  for (auto& cell : cells) cell.level_hist.assign(static_cast<std::size_t>(m_cap) + 1, 0.0);

  const CoefficientVector c0 = analyze(desc.drift.f, m_cap, *basis);
  const double tail0 = l2_distance(synthesize(c0, *basis), desc.drift.f);

  for (std::size_t ci = 0; ci < config.n_grid.size(); ++ci) {
    PathConfig probe;
    probe.n = config.n_grid[ci];
    probe.Delta = std::pow(static_cast<double>(probe.n), -config.delta_exponent);
    probe.L0 = config.L0;
    check_regime(config, probe);
  }

  std::mutex mu;
  parallel_for_indexed(
      config.n_grid.size() * chains,
      [&](std::size_t task) {
        const std::size_t ci = task / chains;
        const std::size_t r = task % chains;
        const std::size_t n = config.n_grid[ci];
        const double delta =
            std::pow(static_cast<double>(n), -config.delta_exponent);
        PathConfig pc;
        pc.n = n;
        pc.Delta = delta;
        pc.substeps = substeps;
        pc.seed = config.seed + r + 104729 * ci;
        pc.L0 = config.L0;
        MCMCConfig local = mcfg;
        local.seed = pc.seed + 17;
        try {
          const SamplePath path = simulate_path(model, pc);
          const Observations obs = subsample(path, pc);
          const PosteriorChain chain = run_mcmc(prior, obs, local, *basis, desc.sigma);
          std::vector<double> dist;
          dist.reserve(chain.draws.size());
          std::vector<double> levels(static_cast<std::size_t>(m_cap) + 1, 0.0);
          for (const Draw& d : chain.draws) {
            const double dc = coeff_l2_distance(d.coeffs, c0);
            dist.push_back(std::sqrt(dc * dc + tail0 * tail0));
            if (d.m <= m_cap) ++levels[static_cast<std::size_t>(d.m)];
          }
          const CoefficientVector pm = posterior_mean(chain, m_cap);
          const double dpm = coeff_l2_distance(pm, c0);
          std::lock_guard<std::mutex> lock(mu);
          for (std::size_t l = 0; l < levels.size(); ++l)
            cells[ci].level_hist[l] += levels[l];
          cells[ci].distances.push_back(std::move(dist));
          cells[ci].post_mean_err.push_back(std::sqrt(dpm * dpm + tail0 * tail0));
          cells[ci].eps_n = epsilon_rate(n, delta, s);
          cells[ci].delta = delta;
        } catch (const std::exception&) {
          std::lock_guard<std::mutex> lock(mu);
          ++cells[ci].aborted;
          cells[ci].eps_n = epsilon_rate(n, delta, s);
          cells[ci].delta = delta;
        }
      },
      config.threads);

  // Calibrate M on the smallest n so the ball mass there is 1/2, then freeze.
  double M = config.raw.value("M", 0.0);
  if (M <= 0.0) {
    std::vector<double> pooled;
    for (const auto& d : cells[0].distances) pooled.insert(pooled.end(), d.begin(), d.end());
    if (pooled.empty()) throw std::runtime_error("contraction study: first cell empty");
    M = median(pooled) / cells[0].eps_n;
  }
  report.extras["M"] = M;

  std::vector<double> masses, errs, err_ses;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    const double radius = M * cell.eps_n;
    RunningStats mass_st, err_st;
    for (const auto& dist : cell.distances) {
      std::size_t inside = 0;
      for (double d : dist)
        if (d <= radius) ++inside;
      mass_st.add(dist.empty() ? 0.0 : static_cast<double>(inside) / dist.size());
    }
    for (double e : cell.post_mean_err) err_st.add(e);
    json row;
    row["n"] = config.n_grid[ci];
    row["Delta"] = cell.delta;
    row["eps_n"] = cell.eps_n;
    row["radius"] = radius;
    row["ball_mass"] = mass_st.mean();
    row["ball_mass_se"] = mass_st.mean_se();
    row["post_mean_error"] = err_st.mean();
    row["post_mean_error_se"] = err_st.mean_se();
    row["chains"] = cell.distances.size();
    row["aborted"] = cell.aborted;
    {
      std::vector<double> pooled;
      for (const auto& d : cell.distances) pooled.insert(pooled.end(), d.begin(), d.end());
      if (!pooled.empty()) {
        row["dist_q50"] = median(pooled);
        row["dist_q90"] = quantile(pooled, 0.9);
      }
      double total = 0.0;
      for (double c : cell.level_hist) total += c;
      json freq = json::array();
      for (double c : cell.level_hist) freq.push_back(total > 0 ? c / total : 0.0);
      row["level_freq"] = freq;
    }
    report.cells.push_back(row);
    masses.push_back(mass_st.mean());
    errs.push_back(err_st.mean());
    err_ses.push_back(err_st.mean_se());
  }

  bool monotone = true;
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (masses[i] < masses[i - 1] - 0.05) monotone = false;
  report.verdicts.push_back({"contraction_mass_monotone", monotone,
                             "masses nondecreasing within 0.05"});
  const bool terminal = !masses.empty() && masses.back() >= 0.9;
  report.verdicts.push_back({"contraction_terminal_mass", terminal,
                             "terminal mass " +
                                 (masses.empty() ? std::string("n/a")
                                                 : std::to_string(masses.back()))});
  bool err_down = true;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double noise = 2.0 * std::sqrt(err_ses[i] * err_ses[i] +
                                         err_ses[i - 1] * err_ses[i - 1]);
    if (errs[i] > errs[i - 1] + noise) err_down = false;
  }
  report.verdicts.push_back(
      {"contraction_error_decreasing", err_down, "posterior-mean error decreasing within MC noise"});

  report.runtime_seconds = seconds_since(t0);
  return report;
}

// ---------------------------------------------------------------------------
// KL / smallball perturbation study
// ---------------------------------------------------------------------------

StudyReport run_smallball_and_kl(const StudyConfig& config) {
  const auto t0 = clock_type::now();
  StudyReport report;
  report.study = "klcheck";

  auto basis = make_basis(config.raw);
  const ModelDescription desc = model_from_json(config.model, basis);
  const Model model0(ModelParams{desc.drift, desc.sigma, desc.s, desc.A0});

  std::vector<double> distances = {0.05, 0.1, 0.2};
  if (config.raw.contains("distances")) {
    distances.clear();
    for (const auto& v : config.raw.at("distances")) distances.push_back(v.get<double>());
  }
  const std::size_t n = config.n_grid.empty() ? 512 : config.n_grid.front();
  const double delta = config.raw.value("Delta", 0.005);
  const std::size_t reps = config.reps;
  const int substeps = config.raw.value("substeps", 20);
  const int pert_k = config.raw.value("perturbation_frequency", 2);
  const double margin = config.raw.value("freeze_margin", 1.25);

  // Perturbation b = b0 + dist * sqrt(2) sin(2 pi k x): exact L2 distance.
  auto perturbed = [&](double dist) {
    DriftSpec b = desc.drift;
    const double amp = dist * std::sqrt(2.0);
    const PeriodicFunction base = desc.drift.f;
    const PeriodicFunction dbase = desc.drift.df;
    b.f = PeriodicFunction([base, amp, pert_k](double x) {
      return base(x) + amp * std::sin(2.0 * M_PI * pert_k * x);
    });
    b.df = PeriodicFunction([dbase, amp, pert_k](double x) {
      return dbase(x) + amp * 2.0 * M_PI * pert_k * std::cos(2.0 * M_PI * pert_k * x);
    });
    b.K0 = desc.drift.K0 + amp * (1.0 + 2.0 * M_PI * pert_k);
    return b;
  };

  // Zero-distance control row.
  {
    const KlCheckReport zero = kl_checks(model0, model0, n, delta, std::min<std::size_t>(reps, 5000),
                                         config.seed, substeps);
    json row;
    row["distance"] = 0.0;
    row["kl_path"] = zero.kl_path;
    row["kl_path_se"] = zero.kl_path_se;
    row["kl_joint"] = zero.kl_joint;
    row["kl_joint_se"] = zero.kl_joint_se;
    row["kl_invariant"] = zero.kl_invariant;
    report.cells.push_back(row);
    const bool ok = std::abs(zero.kl_path) <= 3.0 * std::max(zero.kl_path_se, 1e-300) &&
                    std::abs(zero.kl_joint) <= 3.0 * std::max(zero.kl_joint_se, 1e-300) &&
                    zero.kl_invariant <= 1e-12;
    report.verdicts.push_back({"klcheck_zero_case", ok, "divergences vanish at b = b0"});
  }

  std::vector<KlCheckReport> reps_out(distances.size());
  for (std::size_t di = 0; di < distances.size(); ++di) {
    const DriftSpec b = perturbed(distances[di]);
    const Model model(ModelParams{b, desc.sigma, {}, {}});
    reps_out[di] = kl_checks(model0, model, n, delta, reps,
                             config.seed + 31 * (di + 1), substeps);
    const auto& r = reps_out[di];
    json row;
    row["distance"] = distances[di];
    row["l2_dist"] = r.l2_dist;
    row["kl_path"] = r.kl_path;
    row["kl_path_se"] = r.kl_path_se;
    row["kl_path_cv"] = r.kl_path_cv;
    row["kl_path_cv_se"] = r.kl_path_cv_se;
    row["kl_quad"] = r.kl_quad;
    row["kl_ratio"] = r.kl_path_cv / (delta * distances[di] * distances[di]);
    row["kl_invariant"] = r.kl_invariant;
    row["kl_invariant_ratio"] = r.kl_invariant / (distances[di] * distances[di]);
    row["var_joint"] = r.var_joint;
    row["var_joint_se"] = r.var_joint_se;
    row["tensorization_rhs"] = r.tensorization_rhs;
    row["tensorization_ok"] = r.tensorization_ok;
    row["decomposition_residual"] = r.decomposition_residual;
    row["decomposition_residual_se"] = r.decomposition_residual_se;
    report.cells.push_back(row);
  }

  // KL(b0,b) / (Delta ||b-b0||^2) constant across scales within factor 1.5.
  {
    double lo = 1e300, hi = -1e300;
    for (std::size_t di = 0; di < distances.size(); ++di) {
      const double ratio =
          reps_out[di].kl_path_cv / (delta * distances[di] * distances[di]);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    report.extras["kl_ratio_min"] = lo;
    report.extras["kl_ratio_max"] = hi;
    report.verdicts.push_back({"klcheck_quadratic_scaling", hi <= 1.5 * lo,
                               "ratio spread " + std::to_string(hi / lo) +
                                   " within factor 1.5"});
  }

  // Calibrate-then-freeze constants at the smallest distance.
  {
    const double d0 = distances.front();
    const double Cpath = margin * reps_out.front().kl_path_cv / (delta * d0 * d0);
    const double Cinv = margin * reps_out.front().kl_invariant / (d0 * d0);
    report.extras["C_path_frozen"] = Cpath;
    report.extras["C_invariant_frozen"] = Cinv;
    bool ok_path = true, ok_inv = true;
    for (std::size_t di = 1; di < distances.size(); ++di) {
      const double d2 = distances[di] * distances[di];
      if (reps_out[di].kl_path_cv > Cpath * delta * d2) ok_path = false;
      if (reps_out[di].kl_invariant > Cinv * d2) ok_inv = false;
    }
    report.verdicts.push_back({"klcheck_kl_dominated", ok_path,
                               "KL(b0,b) <= C Delta ||b-b0||^2 with frozen C"});
    report.verdicts.push_back({"klcheck_invariant_dominated", ok_inv,
                               "K(pi0,pib) <= C' ||b-b0||^2 with frozen C'"});
  }

  {
    bool tens = true, decomp = true;
    for (const auto& r : reps_out) {
      if (!r.tensorization_ok) tens = false;
      if (std::abs(r.decomposition_residual) > 3.0 * r.decomposition_residual_se)
        decomp = false;
    }
    report.verdicts.push_back({"klcheck_tensorization", tens,
                               "Var log p0n/pbn <= 3(Var pi + n Var step) + 3 SE"});
    report.verdicts.push_back({"klcheck_decomposition", decomp,
                               "K(p0n,pbn) = K(pi0,pib) + n KL within 3 SE"});
  }

  report.runtime_seconds = seconds_since(t0);
  return report;
}

// ---------------------------------------------------------------------------
// Prior support and small-ball study
// ---------------------------------------------------------------------------

StudyReport run_prior_support_study(const StudyConfig& config) {
  const auto t0 = clock_type::now();
  StudyReport report;
  report.study = "smallball";

  auto basis = make_basis(config.raw);
  PriorSpec prior = config.raw.contains("prior")
                        ? prior_from_json(config.raw.at("prior"))
                        : PriorSpec::sieve_prior(1.0, QKind::uniform, 5);

  const std::size_t support_draws = config.raw.value("support_draws", std::size_t{10000});
  const std::size_t ball_draws = config.raw.value("ball_draws", std::size_t{200000});
  const int ball_m = config.raw.value("ball_m", 2);
  const double ball_eps = config.raw.value("ball_eps", 0.5);

  const double K0 = implied_theta_bound(prior, *basis);
  report.extras["K0_implied"] = K0;

  // Theta membership of prior draws, via grid sup-norms of the synthesis.
  std::size_t violations = 0;
  double worst = 0.0;
  {
    CounterRng rng(config.seed);
    const std::size_t grid = 512;
    for (std::size_t r = 0; r < support_draws; ++r) {
      const int m = sample_prior_level(prior, rng);
      const CoefficientVector c = sample_prior(prior, m, rng);
      std::vector<double> vals(grid + 1);
      for (std::size_t j = 0; j <= grid; ++j)
        vals[j] = synthesize_at(c, *basis, static_cast<double>(j) / grid);
      vals[grid] = vals[0];
      const auto dv = periodic_derivative4(vals);
      double supb = 0.0, supdb = 0.0;
      for (std::size_t j = 0; j < grid; ++j) {
        supb = std::max(supb, std::abs(vals[j]));
        supdb = std::max(supdb, std::abs(dv[j]));
      }
      const double c1 = supb + supdb;
      worst = std::max(worst, c1);
      if (c1 > K0) ++violations;
    }
  }
  report.extras["support_draws"] = support_draws;
  report.extras["worst_c1_norm"] = worst;
  report.verdicts.push_back({"smallball_prior_support", violations == 0,
                             std::to_string(violations) + " of " +
                                 std::to_string(support_draws) +
                                 " draws violate Theta(K0_implied)"});

  // Small-ball mass at resolution ball_m against (eps zeta / 2)^{D_m}.
  {
    CounterRng rng(config.seed + 1);
    // Projection of a b0 in the prior's own representation: beta_lk inside
    // the bulk of the q support so the bound applies.
    const std::size_t dim = std::size_t{1} << ball_m;
    std::vector<double> c0(dim);
    CounterRng beta_rng(config.raw.value("b0_seed", std::uint64_t{42}));
    for (std::size_t s = 0; s < dim; ++s) {
      auto [l, k] = CoefficientVector::level_of(s);
      (void)k;
      double beta;
      if (prior.q_kind == QKind::uniform) {
        beta = prior.B * (0.3 + 0.4 * beta_rng.uniform());
      } else {
        beta = prior.B * (0.8 * beta_rng.uniform() - 0.4);
      }
      c0[s] = prior.tau_at(l) * beta;
    }
    std::size_t inside = 0;
    for (std::size_t r = 0; r < ball_draws; ++r) {
      double d2 = 0.0;
      for (std::size_t s = 0; s < dim; ++s) {
        auto [l, k] = CoefficientVector::level_of(s);
        (void)k;
        const double c = prior.tau_at(l) * sample_q(prior, rng);
        d2 += (c - c0[s]) * (c - c0[s]);
      }
      if (d2 <= ball_eps * ball_eps) ++inside;
    }
    const double mass = static_cast<double>(inside) / static_cast<double>(ball_draws);
    const double se = std::sqrt(mass * (1.0 - mass) / static_cast<double>(ball_draws));
    const double bound = std::pow(ball_eps * prior.zeta / 2.0, static_cast<double>(dim));
    report.extras["ball_mass"] = mass;
    report.extras["ball_mass_se"] = se;
    report.extras["ball_bound"] = bound;
    report.verdicts.push_back({"smallball_mass", mass >= bound - 3.0 * se,
                               "mass " + std::to_string(mass) + " >= (eps zeta/2)^D - 3 SE = " +
                                   std::to_string(bound - 3.0 * se)});
  }

  report.runtime_seconds = seconds_since(t0);
  return report;
}

// ---------------------------------------------------------------------------
// Holder modulus study
// ---------------------------------------------------------------------------

StudyReport run_holder_study(const StudyConfig& config) {
  const auto t0 = clock_type::now();
  StudyReport report;
  report.study = "holder";

  json model_json = config.raw.contains("model") ? config.raw.at("model") : json();
  ModelDescription desc;
  if (model_json.is_null() || model_json.empty()) {
    // Driftless unit-diffusion default: the Brownian reference case.
    desc.drift = DriftSpec::zero();
    desc.sigma = SigmaSpec::constant(1.0);
  } else {
    desc = model_from_json(config.model);
  }
  const Model model(ModelParams{desc.drift, desc.sigma, {}, {}});

  std::vector<double> horizons = {25.0, 100.0, 400.0};
  if (config.raw.contains("horizons")) {
    horizons.clear();
    for (const auto& v : config.raw.at("horizons")) horizons.push_back(v.get<double>());
  }
  const std::size_t paths = config.raw.value("paths", std::size_t{200});
  const double fine_dt = config.raw.value("fine_dt", 1e-3);
  const double mesh_cap = config.raw.value("mesh_cap", std::exp(-2.0));
  const double quant = config.raw.value("quantile", 0.99);

  auto run_block = [&](const Model& mdl, double horizon, std::uint64_t seed_base) {
    std::vector<double> stats(paths);
    parallel_for_indexed(
        paths,
        [&](std::size_t r) {
          PathConfig pc;
          pc.n = static_cast<std::size_t>(std::lround(horizon / 0.01));
          pc.Delta = 0.01;
          pc.substeps = std::max(1, static_cast<int>(std::lround(0.01 / fine_dt)));
          pc.seed = seed_base + r;
          pc.high_frequency = false;
          const SamplePath path = simulate_path(mdl, pc);
          stats[r] = holder_modulus_stat(path, horizon, mesh_cap);
        },
        config.threads);
    return stats;
  };

  std::vector<double> envelopes;
  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    const double m = horizons[hi];
    const auto stats = run_block(model, m, config.seed + 1000003 * hi);
    const double q = quantile(stats, quant);
    const double env = q / std::sqrt(std::log(m));
    envelopes.push_back(env);
    json row;
    row["m"] = m;
    row["paths"] = paths;
    row["quantile"] = quant;
    row["modulus_q"] = q;
    row["envelope"] = env;
    row["median"] = median(stats);
    RunningStats st;
    for (double v : stats) st.add(v);
    row["mean"] = st.mean();
    row["mean_se"] = st.mean_se();
    report.cells.push_back(row);
  }

  {
    double mean_env = 0.0;
    for (double e : envelopes) mean_env += e;
    mean_env /= static_cast<double>(envelopes.size());
    bool flat = true;
    for (double e : envelopes)
      if (std::abs(e - mean_env) > 0.25 * mean_env) flat = false;
    report.extras["envelopes"] = envelopes;
    report.verdicts.push_back({"holder_envelope_flat", flat,
                               "normalized 0.99-quantile flat within 25%"});
    bool positive = true;
    for (const auto& row : report.cells)
      if (!(row.at("modulus_q").get<double>() > 0.0) ||
          !std::isfinite(row.at("modulus_q").get<double>()))
        positive = false;
    report.verdicts.push_back({"holder_quantiles_finite", positive,
                               "quantiles positive and finite"});
  }

  // Brownian scaling: doubling sigma doubles the envelope within MC noise.
  if (config.raw.value("sigma_scaling", true)) {
    const double m_mid = horizons[horizons.size() / 2];
    SigmaSpec doubled = desc.sigma;
    const PeriodicFunction base = desc.sigma.f;
    doubled.f = PeriodicFunction([base](double x) { return 2.0 * base(x); });
    doubled.sigma_L = 2.0 * desc.sigma.sigma_L;
    doubled.sigma_U = 2.0 * desc.sigma.sigma_U;
    const Model model2(ModelParams{desc.drift, doubled, {}, {}});
    const auto s1 = run_block(model, m_mid, config.seed + 500009);
    const auto s2 = run_block(model2, m_mid, config.seed + 500009);
    const double q1 = quantile(s1, quant), q2 = quantile(s2, quant);
    report.extras["sigma_scaling_ratio"] = q2 / q1;
    report.verdicts.push_back({"holder_sigma_scaling",
                               q2 / q1 > 2.0 * 0.75 && q2 / q1 < 2.0 * 1.25,
                               "doubling sigma doubles the 0.99 quantile (ratio " +
                                   std::to_string(q2 / q1) + ")"});
  }

  report.runtime_seconds = seconds_since(t0);
  return report;
}

StudyReport run_study(const StudyConfig& config) {
  if (config.study == "rate") return run_rate_study(config);
  if (config.study == "contraction") return run_contraction_study(config);
  if (config.study == "klcheck") return run_smallball_and_kl(config);
  if (config.study == "smallball") return run_prior_support_study(config);
  if (config.study == "holder") return run_holder_study(config);
  throw std::invalid_argument("unknown study: " + config.study);
}

void write_study_plots(const StudyReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  if (report.study == "rate" && report.cells.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& row : report.cells) {
      if (!row.contains("median_error")) continue;
      x.push_back(std::log(row.at("n_Delta").get<double>()));
      y.push_back(std::log(row.at("median_error").get<double>()));
    }
    SvgPlot plot("estimator rate", "log n Delta", "log median L2 error");
    plot.add_series(x, y, "median error");
    if (report.extras.contains("slope")) {
      const double a = report.extras.at("slope").get<double>();
      std::vector<double> fy;
      const double x0 = x.front(), y0 = y.front();
      for (double xv : x) fy.push_back(y0 + a * (xv - x0));
      plot.add_series(x, fy, "slope fit", false);
    }
    plot.save(out_dir + "/rate_loglog.svg");
  } else if (report.study == "contraction" && !report.cells.empty()) {
    std::vector<double> x, y, e;
    for (const auto& row : report.cells) {
      x.push_back(std::log2(row.at("n").get<double>()));
      y.push_back(row.at("ball_mass").get<double>());
      e.push_back(row.at("post_mean_error").get<double>());
    }
    SvgPlot plot("posterior contraction", "log2 n", "ball mass / error");
    plot.add_series(x, y, "ball mass");
    plot.add_series(x, e, "post-mean L2 error");
    plot.save(out_dir + "/contraction.svg");
  } else if (report.study == "holder" && !report.cells.empty()) {
    std::vector<double> x, y;
    for (const auto& row : report.cells) {
      x.push_back(std::log(row.at("m").get<double>()));
      y.push_back(row.at("envelope").get<double>());
    }
    SvgPlot plot("Holder modulus envelope", "log m", "q99 / sqrt(log m)");
    plot.add_series(x, y, "envelope");
    plot.save(out_dir + "/holder_envelope.svg");
  }
}

}  // namespace driftbench
