#include "tkf/config.hpp"

#include "tkf/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tkf {

using nlohmann::json;

Seeds Seeds::from_base(std::uint64_t s) { return {s, s + 1, s + 2, s + 3}; }

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void RunConfig::validate() const {
  const ModelSettings& m = model;
  if (!(m.delta_t > 0.0)) throw ConfigError("model.delta_t must be positive");
  if (!(m.c >= 0.0)) throw ConfigError("model.c must be non-negative");
  if (!(m.gamma_reg >= 0.0)) throw ConfigError("model.gamma_reg must be non-negative");
  if (!(m.sigma_obs > 0.0)) throw ConfigError("model.sigma_obs must be positive");
  if (!std::isfinite(m.alpha_init)) throw ConfigError("model.alpha_init must be finite");
  if (m.rff_features < 1) throw ConfigError("model.rff_features must be at least 1");
  if (!(m.kernel_bandwidth > 0.0)) throw ConfigError("model.kernel_bandwidth must be positive");
  if (m.lower_taps < 1 || m.upper_taps < 0) throw ConfigError("model needs at least one lower tap");
  if (!(rates.alpha >= 0.0 && rates.taps >= 0.0 && rates.gamma >= 0.0)) {
    throw ConfigError("learning rates must be non-negative");
  }
  if (!std::isfinite(gradient_clip)) throw ConfigError("model.gradient_clip must be finite");
  if (!(p0_scale > 0.0)) throw ConfigError("model.p0_scale must be positive");
  if (generator.length == 0) throw ConfigError("stream.length must be positive");
  if (!(generator.cell_ratio >= 0.0 && generator.cell_ratio <= 1.0)) throw ConfigError("stream.cell_ratio must lie in [0, 1]");
  if (!(generator.sigma_o >= 0.0)) throw ConfigError("stream.sigma_o must be non-negative");
  if (!(generator.delta_t > 0.0)) throw ConfigError("stream.delta_t must be positive");
  if (!(p_stab >= 0.0 && p_stab < 1.0)) throw ConfigError("p_stab must lie in [0, 1)");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("missing_rate must lie in [0, 1)");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw ConfigError("identify.warmup_fraction must lie in [0, 1)");
  if (!std::isfinite(epsilon)) throw ConfigError("identify.epsilon must be finite");
  if (complex_source == ComplexSource::kFile && complex_path.empty()) throw ConfigError("complex.path is required");
  if (complex_source == ComplexSource::kEdges && edges.empty()) throw ConfigError("complex.edges is required");
  if (stream_source == StreamSource::kCsv && stream_path.empty()) throw ConfigError("stream.path is required");
}

const Seeds& RunConfig::require_seeds() const {
  if (!seeds) throw ConfigError("seeds are mandatory: give a 'seeds' block or --seed");
  return *seeds;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  try {
    check_keys(doc, "config",
               {"complex", "model", "stream", "p_stab", "missing_rate", "seeds", "activation", "truth_path", "identify"});

    if (doc.contains("complex")) {
      const json& c = doc.at("complex");
      check_keys(c, "complex", {"source", "path", "nodes", "edges", "max_cycle_len", "pool_cap"});
      const std::string src = c.value("source", "builtin");
      if (src == "builtin") cfg.complex_source = ComplexSource::kBuiltin;
      else if (src == "file") cfg.complex_source = ComplexSource::kFile;
      else if (src == "edges") cfg.complex_source = ComplexSource::kEdges;
      else throw ConfigError("complex.source must be builtin, file or edges");
      if (c.contains("path")) cfg.complex_path = resolve(base, c.at("path").get<std::string>());
      read(c, "nodes", cfg.edge_nodes);
      if (c.contains("edges")) {
        for (const auto& e : c.at("edges")) {
          if (e.size() != 2) throw ConfigError("complex.edges entries must be [tail, head]");
          cfg.edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
      }
      read(c, "max_cycle_len", cfg.max_cycle_len);
      read(c, "pool_cap", cfg.pool_cap);
    }

    if (doc.contains("model")) {
      const json& m = doc.at("model");
      check_keys(m, "model",
                 {"c", "delta_t", "gamma_reg", "sigma_obs", "alpha_init", "rff_features", "kernel_bandwidth",
                  "lower_taps", "upper_taps", "p0_scale", "joseph", "gradient_clip", "learning_rates"});
      read(m, "c", cfg.model.c);
      read(m, "delta_t", cfg.model.delta_t);
      read(m, "gamma_reg", cfg.model.gamma_reg);
      read(m, "sigma_obs", cfg.model.sigma_obs);
      read(m, "alpha_init", cfg.model.alpha_init);
      read(m, "rff_features", cfg.model.rff_features);
      read(m, "kernel_bandwidth", cfg.model.kernel_bandwidth);
      read(m, "lower_taps", cfg.model.lower_taps);
      read(m, "upper_taps", cfg.model.upper_taps);
      read(m, "p0_scale", cfg.p0_scale);
      read(m, "joseph", cfg.joseph);
      read(m, "gradient_clip", cfg.gradient_clip);
      if (m.contains("learning_rates")) {
        const json& r = m.at("learning_rates");
        check_keys(r, "model.learning_rates", {"alpha", "taps", "gamma"});
        read(r, "alpha", cfg.rates.alpha);
        read(r, "taps", cfg.rates.taps);
        read(r, "gamma", cfg.rates.gamma);
      }
    }

    if (doc.contains("stream")) {
      const json& s = doc.at("stream");
      check_keys(s, "stream",
                 {"source", "path", "length", "cell_ratio", "c", "delta_t", "sigma_p", "sigma_o", "amplitude",
                  "tap_range", "lower_taps", "upper_taps"});
      const std::string src = s.value("source", "synthetic");
      if (src == "synthetic") cfg.stream_source = StreamSource::kSynthetic;
      else if (src == "csv") cfg.stream_source = StreamSource::kCsv;
      else throw ConfigError("stream.source must be synthetic or csv");
      if (s.contains("path")) cfg.stream_path = resolve(base, s.at("path").get<std::string>());
      GeneratorSettings& g = cfg.generator;
      read(s, "length", g.length);
      read(s, "cell_ratio", g.cell_ratio);
      read(s, "c", g.c);
      read(s, "delta_t", g.delta_t);
      read(s, "sigma_p", g.sigma_p);
      read(s, "sigma_o", g.sigma_o);
      read(s, "amplitude", g.amplitude);
      read(s, "tap_range", g.tap_range);
      read(s, "lower_taps", g.lower_taps);
      read(s, "upper_taps", g.upper_taps);
    }

    read(doc, "p_stab", cfg.p_stab);
    read(doc, "missing_rate", cfg.missing_rate);

    if (doc.contains("seeds")) {
      const json& s = doc.at("seeds");
      check_keys(s, "seeds", {"topology", "noise", "rff", "mask"});
      for (const char* k : {"topology", "noise", "rff", "mask"}) {
        if (!s.contains(k)) throw ConfigError(std::string("seeds.") + k + " is required");
      }
      cfg.seeds = Seeds{s.at("topology").get<std::uint64_t>(), s.at("noise").get<std::uint64_t>(),
                        s.at("rff").get<std::uint64_t>(), s.at("mask").get<std::uint64_t>()};
    }

    if (doc.contains("activation")) {
      const json& a = doc.at("activation");
      if (a.is_array()) {
        cfg.activation = ActivationMode::kList;
        cfg.activation_list = a.get<std::vector<std::size_t>>();
      } else {
        const std::string mode = a.get<std::string>();
        if (mode == "auto") cfg.activation = ActivationMode::kAuto;
        else if (mode == "all") cfg.activation = ActivationMode::kAll;
        else if (mode == "none") cfg.activation = ActivationMode::kNone;
        else if (mode == "truth") cfg.activation = ActivationMode::kTruth;
        else throw ConfigError("activation must be auto, all, none, truth or a list of face indices");
      }
    }
    if (doc.contains("truth_path")) cfg.truth_path = resolve(base, doc.at("truth_path").get<std::string>());

    if (doc.contains("identify")) {
      const json& i = doc.at("identify");
      check_keys(i, "identify", {"warmup_fraction", "epsilon"});
      read(i, "warmup_fraction", cfg.warmup_fraction);
      read(i, "epsilon", cfg.epsilon);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string config_schema() {
  return R"(Config JSON (every key optional unless noted):
  complex:  {source: "builtin" | "file" | "edges", path, nodes, edges: [[tail, head], ...],
             max_cycle_len: 8, pool_cap: 512}
  model:    {c: 0.5, delta_t: 0.1, gamma_reg: 1e-3, sigma_obs: 1, alpha_init: 1,
             rff_features: 2, kernel_bandwidth: 5, lower_taps: 3, upper_taps: 3,
             p0_scale: 1, joseph: false, gradient_clip: 1,
             learning_rates: {alpha: 1e-3, taps: 1e-3, gamma: 1e-3}}
  stream:   {source: "synthetic" | "csv", path, length: 1000, cell_ratio: 1,
             c: 0.5, delta_t: 0.1, sigma_p: 1, sigma_o: 1, amplitude: 10,
             tap_range: 0.5, lower_taps: 3, upper_taps: 3}
  p_stab: 0.1, missing_rate: 0
  seeds:    {topology, noise, rff, mask}   required unless --seed is given
  activation: "auto" | "all" | "none" | "truth" | [face indices]
  truth_path: JSON file {"activation": [0/1, ...]} for external data
  identify: {warmup_fraction: 0.1, epsilon: 0}
)";
}

std::vector<std::uint8_t> load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open truth file " + path.string());
  try {
    json doc;
    in >> doc;
    return doc.at("activation").get<std::vector<std::uint8_t>>();
  } catch (const json::exception& e) {
    throw ConfigError("malformed truth file " + path.string() + ": " + e.what());
  }
}

void save_truth(const std::vector<std::uint8_t>& truth, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << json{{"activation", truth}}.dump() << '\n';
}

}  // namespace tkf
