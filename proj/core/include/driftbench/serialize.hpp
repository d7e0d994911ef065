// SPDX-License-Identifier: Apache-2.0
/**
 * @file serialize.hpp
 * @brief File formats: coefficient JSON, model description JSON, observation
 * CSV, binary fine paths with JSON sidecars, chain JSONL, fit results.
 */
#pragma once

#include <json.hpp>
#include <memory>
#include <string>

#include "driftbench/bayes.hpp"
#include "driftbench/estimator.hpp"
#include "driftbench/model.hpp"
#include "driftbench/simulate.hpp"
#include "driftbench/wavelet.hpp"

namespace driftbench {

using json = nlohmann::json;

// --- CoefficientVector: {"m": int, "coeffs": [[l, k, value], ...]} ---------
json coeffs_to_json(const CoefficientVector& c);
CoefficientVector coeffs_from_json(const json& j);

// --- Basis options ----------------------------------------------------------
json basis_to_json(const WaveletBasis::Options& opts);
WaveletBasis::Options basis_from_json(const json& j);

// --- Model description ------------------------------------------------------
// {"drift": {"type": "closed_form"|"wavelet"|"rough_besov", ...},
//  "sigma": {"type": "constant"|"trig", ...}, "K0": r, "s": r, "A0": r}
struct ModelDescription {
  DriftSpec drift;
  SigmaSpec sigma;
  std::optional<double> s;
  std::optional<double> A0;

  ModelParams params() const { return ModelParams{drift, sigma, s, A0}; }
};

ModelDescription model_from_json(const json& j,
                                 std::shared_ptr<const WaveletBasis> basis = nullptr);
ModelDescription model_from_file(const std::string& path,
                                 std::shared_ptr<const WaveletBasis> basis = nullptr);

/// Rough Besov-generic drift: c_{-1,0} = 0 and c_lk = +-B 2^{-l(s+1/2)} with
/// deterministic pseudo-random signs; the sharp B^s_{2,infty} member used by
/// bias-sensitive studies.
CoefficientVector rough_besov_coeffs(double s, double B, int levels, std::uint64_t seed);

// --- Observations CSV: header "k,t,x"; rows k, k*Delta, X_{k Delta} ---------
void write_observations_csv(const Observations& obs, const std::string& path);
Observations read_observations_csv(const std::string& path);

// --- Fine paths: little-endian float64 + JSON sidecar {n, Delta, substeps, seed}
void write_path_binary(const SamplePath& path, const PathConfig& config,
                       const std::string& binpath, const std::string& sidecar);
SamplePath read_path_binary(const std::string& binpath, const std::string& sidecar);

// --- Fit result: coefficient JSON plus metadata -----------------------------
json fit_to_json(const FitResult& fit);

// --- Chain persistence: one JSON-lines record per draw ----------------------
void write_chain_jsonl(const PosteriorChain& chain, const std::string& path);

json prior_to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const json& j);

}  // namespace driftbench
