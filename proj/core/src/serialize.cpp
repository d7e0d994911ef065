// SPDX-License-Identifier: Apache-2.0
#include "driftbench/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace driftbench {

json coeffs_to_json(const CoefficientVector& c) {
  json triplets = json::array();
  for (std::size_t s = 0; s < c.size(); ++s) {
    auto [l, k] = CoefficientVector::level_of(s);
    triplets.push_back({l, k, c.flat()[s]});
  }
  return json{{"m", c.resolution()}, {"coeffs", triplets}};
}

CoefficientVector coeffs_from_json(const json& j) {
  CoefficientVector c(j.at("m").get<int>());
  for (const auto& t : j.at("coeffs")) {
    const int l = t.at(0).get<int>();
    const int k = t.at(1).get<int>();
    c.at(l, k) = t.at(2).get<double>();
  }
  return c;
}

json basis_to_json(const WaveletBasis::Options& opts) {
  return json{{"family", opts.family == WaveletFamily::daubechies_periodized
                             ? "daubechies"
                             : "fourier"},
              {"order", opts.order},
              {"max_level", opts.max_level},
              {"quad_points", opts.quad_points}};
}

WaveletBasis::Options basis_from_json(const json& j) {
  WaveletBasis::Options opts;
  const std::string fam = j.value("family", "daubechies");
  if (fam == "daubechies") {
    opts.family = WaveletFamily::daubechies_periodized;
  } else if (fam == "fourier") {
    opts.family = WaveletFamily::fourier_trig;
  } else {
    throw std::invalid_argument("basis_from_json: unknown family " + fam);
  }
  opts.order = j.value("order", 8);
  opts.max_level = j.value("max_level", 10);
  opts.quad_points = j.value("quad_points", std::size_t{1} << 14);
  return opts;
}

namespace {

struct TrigTerm {
  bool is_cos = true;
  int k = 1;
  double a = 0.0;
};

std::vector<TrigTerm> parse_trig_terms(const json& j) {
  std::vector<TrigTerm> terms;
  for (const auto& t : j) {
    TrigTerm term;
    const std::string kind = t.at("kind").get<std::string>();
    if (kind == "cos") {
      term.is_cos = true;
    } else if (kind == "sin") {
      term.is_cos = false;
    } else {
      throw std::invalid_argument("trig term kind must be cos or sin");
    }
    term.k = t.value("k", 1);
    term.a = t.at("a").get<double>();
    terms.push_back(term);
  }
  return terms;
}

PeriodicFunction trig_function(double offset, std::vector<TrigTerm> terms) {
  return PeriodicFunction([offset, terms = std::move(terms)](double x) {
    double v = offset;
    for (const auto& t : terms) {
      const double arg = 2.0 * M_PI * t.k * x;
      v += t.a * (t.is_cos ? std::cos(arg) : std::sin(arg));
    }
    return v;
  });
}

PeriodicFunction trig_derivative(std::vector<TrigTerm> terms) {
  return PeriodicFunction([terms = std::move(terms)](double x) {
    double v = 0.0;
    for (const auto& t : terms) {
      const double w = 2.0 * M_PI * t.k;
      const double arg = w * x;
      v += t.a * w * (t.is_cos ? -std::sin(arg) : std::cos(arg));
    }
    return v;
  });
}

PeriodicFunction trig_second_derivative(std::vector<TrigTerm> terms) {
  return PeriodicFunction([terms = std::move(terms)](double x) {
    double v = 0.0;
    for (const auto& t : terms) {
      const double w = 2.0 * M_PI * t.k;
      const double arg = w * x;
      v += -t.a * w * w * (t.is_cos ? std::cos(arg) : std::sin(arg));
    }
    return v;
  });
}

}  // namespace

CoefficientVector rough_besov_coeffs(double s, double B, int levels, std::uint64_t seed) {
  CounterRng rng(seed);
  CoefficientVector c(levels);
  for (int l = 0; l < levels; ++l) {
    const double amp = B * std::pow(2.0, -l * (s + 0.5));
    for (int k = 0; k < (1 << l); ++k)
      c.at(l, k) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * amp;
  }
  return c;
}

ModelDescription model_from_json(const json& j,
                                 std::shared_ptr<const WaveletBasis> basis) {
  ModelDescription desc;
  const json& dj = j.at("drift");
  const std::string type = dj.at("type").get<std::string>();
  const double K0 = j.value("K0", 0.0);

  auto need_basis = [&]() -> std::shared_ptr<const WaveletBasis> {
    if (basis) return basis;
    WaveletBasis::Options opts =
        dj.contains("basis") ? basis_from_json(dj.at("basis")) : WaveletBasis::Options{};
    return std::make_shared<const WaveletBasis>(opts);
  };

  if (type == "closed_form") {
    const double offset = dj.value("offset", 0.0);
    auto terms = parse_trig_terms(dj.value("terms", json::array()));
    DriftSpec spec;
    spec.f = trig_function(offset, terms);
    spec.df = trig_derivative(terms);
    spec.K0 = K0;
    desc.drift = std::move(spec);
  } else if (type == "wavelet") {
    auto b = need_basis();
    const CoefficientVector c = coeffs_from_json(dj);
    PeriodicFunction f([b, c](double x) { return synthesize_at(c, *b, x); });
    desc.drift = DriftSpec::from_function(f, K0);
  } else if (type == "rough_besov") {
    auto b = need_basis();
    const CoefficientVector c =
        rough_besov_coeffs(dj.at("s").get<double>(), dj.value("B", 1.0),
                           dj.value("levels", 8), dj.value("seed", 11));
    PeriodicFunction f([b, c](double x) { return synthesize_at(c, *b, x); });
    desc.drift = DriftSpec::from_function(f, K0);
  } else {
    throw std::invalid_argument("model_from_json: unknown drift type " + type);
  }

  if (K0 <= 0.0) {
    // No certificate given: measure the C^1 norm and use it.
    const auto check = check_theta_membership(desc.drift);
    desc.drift.K0 = check.c1_norm * (1.0 + 1e-9) + 1e-12;
  }

  const json& sj = j.at("sigma");
  const std::string stype = sj.at("type").get<std::string>();
  if (stype == "constant") {
    desc.sigma = SigmaSpec::constant(sj.at("value").get<double>());
  } else if (stype == "trig") {
    const double base = sj.value("base", 1.0);
    auto terms = parse_trig_terms(sj.value("terms", json::array()));
    SigmaSpec spec;
    spec.f = trig_function(base, terms);
    spec.second_derivative = trig_second_derivative(terms);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 4096; ++i) {
      const double v = spec.f(i / 4096.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo <= 0.0)
      throw std::invalid_argument("model_from_json: sigma must stay positive");
    spec.sigma_L = sj.value("sigma_L", lo);
    spec.sigma_U = sj.value("sigma_U", hi);
    desc.sigma = std::move(spec);
  } else {
    throw std::invalid_argument("model_from_json: unknown sigma type " + stype);
  }

  if (j.contains("s")) desc.s = j.at("s").get<double>();
  if (j.contains("A0")) desc.A0 = j.at("A0").get<double>();
  return desc;
}

ModelDescription model_from_file(const std::string& path,
                                 std::shared_ptr<const WaveletBasis> basis) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j;
  in >> j;
  return model_from_json(j, std::move(basis));
}

void write_observations_csv(const Observations& obs, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  std::fputs("k,t,x\n", f);
  for (std::size_t k = 0; k < obs.samples.size(); ++k)
    std::fprintf(f, "%zu,%.17g,%.17g\n", k, static_cast<double>(k) * obs.delta,
                 obs.samples[k]);
  std::fclose(f);
}

Observations read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open observations: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,t,x", 0) != 0)
    throw std::runtime_error("observations CSV must start with header k,t,x");
  Observations obs;
  double t1 = 0.0;
  bool first = true, second = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t k = 0;
    double t = 0.0, x = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lg,%lg", &k, &t, &x) != 3)
      throw std::runtime_error("bad observations CSV row: " + line);
    obs.samples.push_back(x);
    if (first) {
      first = false;
      second = true;
    } else if (second) {
      second = false;
      t1 = t;
    }
  }
  if (obs.samples.size() < 2) throw std::runtime_error("observations CSV too short");
  obs.delta = t1;
  return obs;
}

void write_path_binary(const SamplePath& path, const PathConfig& config,
                       const std::string& binpath, const std::string& sidecar) {
  std::ofstream out(binpath, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + binpath);
  // Little-endian float64; this code targets little-endian hosts.
  out.write(reinterpret_cast<const char*>(path.values.data()),
            static_cast<std::streamsize>(path.values.size() * sizeof(double)));
  json meta{{"n", config.n},
            {"Delta", config.Delta},
            {"substeps", config.substeps},
            {"seed", config.seed}};
  std::ofstream side(sidecar);
  side << meta.dump(2) << "\n";
}

SamplePath read_path_binary(const std::string& binpath, const std::string& sidecar) {
  std::ifstream side(sidecar);
  if (!side) throw std::runtime_error("cannot open sidecar: " + sidecar);
  json meta;
  side >> meta;
  PathConfig config;
  config.n = meta.at("n").get<std::size_t>();
  config.Delta = meta.at("Delta").get<double>();
  config.substeps = meta.at("substeps").get<int>();
  config.seed = meta.at("seed").get<std::uint64_t>();

  std::ifstream in(binpath, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open path binary: " + binpath);
  SamplePath path;
  path.dt = config.fine_dt();
  const std::size_t count = config.n * static_cast<std::size_t>(config.substeps) + 1;
  path.values.resize(count);
  in.read(reinterpret_cast<char*>(path.values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("path binary shorter than sidecar promises");
  path.x0 = path.values.front();
  return path;
}

json fit_to_json(const FitResult& fit) {
  json j = coeffs_to_json(fit.coeffs);
  j["l_n"] = fit.level;
  j["gamma_n_value"] = fit.gamma_n;
  j["constraint_active"] = fit.constraint_active;
  j["degenerate"] = fit.degenerate;
  return j;
}

void write_chain_jsonl(const PosteriorChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::size_t iter = 0;
  for (const Draw& d : chain.draws) {
    json rec{{"iter", iter++},
             {"m", d.m},
             {"coeffs", coeffs_to_json(d.coeffs).at("coeffs")},
             {"logpost", d.log_post}};
    out << rec.dump() << "\n";
  }
}

json prior_to_json(const PriorSpec& prior) {
  const char* kind = prior.kind == PriorKind::sieve ? "sieve"
                     : prior.kind == PriorKind::known_smoothness
                         ? "known_smoothness"
                         : "invariant_density";
  return json{{"kind", kind},
              {"B", prior.B},
              {"q", prior.q_kind == QKind::uniform ? "uniform" : "truncated_gaussian"},
              {"s", prior.s},
              {"level_cap", prior.level_cap}};
}

PriorSpec prior_from_json(const json& j) {
  const std::string kind = j.value("kind", "sieve");
  const std::string q = j.value("q", "uniform");
  const QKind qk = q == "uniform" ? QKind::uniform : QKind::truncated_gaussian;
  const double B = j.value("B", 1.0);
  const int cap = j.value("level_cap", 6);
  if (kind == "sieve") return PriorSpec::sieve_prior(B, qk, cap);
  const double s = j.value("s", 2.0);
  if (kind == "known_smoothness") return PriorSpec::known_smoothness(s, B, qk, cap);
  if (kind == "invariant_density")
    return PriorSpec::invariant_density_prior(s, B, qk, cap);
  throw std::invalid_argument("prior_from_json: unknown kind " + kind);
}

}  // namespace driftbench
