// SPDX-License-Identifier: Apache-2.0
/**
 * @file studies.hpp
 * @brief Seeded, reproducible Monte-Carlo studies: estimator rate regression,
 * posterior contraction trend, KL/perturbation scaling, prior support and
 * small-ball mass, and Holder-modulus envelopes.  Reports carry a standard
 * error for every estimate and a named pass/fail verdict per criterion.
 */
#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "driftbench/serialize.hpp"

namespace driftbench {

struct StudyConfig {
  std::string study;  // rate | contraction | klcheck | holder | smallball
  json model;         // description of b0 (and sigma)
  std::vector<std::size_t> n_grid;
  double delta_exponent = 0.6;  // Delta = n^-a, a in (0.5, 1)
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  std::string out_dir;
  double L0 = 10.0;
  bool allow_out_of_regime = false;
  unsigned threads = 0;  // worker pool size; 0 = hardware
  json raw;              // study-specific knobs keep their spelling here

  static StudyConfig from_json(const json& j);
  static StudyConfig from_file(const std::string& path);
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StudyReport {
  std::string study;
  json cells = json::array();
  std::vector<Verdict> verdicts;
  json extras = json::object();
  double runtime_seconds = 0.0;

  json to_json() const;
  bool all_pass() const;
  void save(const std::string& path) const;
};

/// Per-n estimator error cells and the log-log rate regression.
StudyReport run_rate_study(const StudyConfig& config);

/// Posterior ball masses at frozen radius M eps_n across the n grid.
StudyReport run_contraction_study(const StudyConfig& config);

/// Perturbation sweep: KL scaling in Delta ||b-b0||^2, invariant-density KL
/// domination, the by-linearity decomposition, and variance tensorisation.
StudyReport run_smallball_and_kl(const StudyConfig& config);

/// Prior support (Theta membership of draws) and the small-ball mass bound.
StudyReport run_prior_support_study(const StudyConfig& config);

/// Holder modulus quantiles and the sqrt(log m) envelope.
StudyReport run_holder_study(const StudyConfig& config);

/// Dispatch on config.study.
StudyReport run_study(const StudyConfig& config);

/// Write the standard plots for a report (log-log error plot, density
/// overlay, trace plot) into out_dir; best effort, skips unknown studies.
void write_study_plots(const StudyReport& report, const std::string& out_dir);

}  // namespace driftbench
