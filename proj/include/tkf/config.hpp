#pragma once

#include "tkf/filter.hpp"
#include "tkf/model.hpp"
#include "tkf/synthetic.hpp"
#include "tkf/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tkf {

enum class ComplexSource { kBuiltin, kFile, kEdges };
enum class StreamSource { kSynthetic, kCsv };

struct Seeds {
  std::uint64_t topology = 0;
  std::uint64_t noise = 0;
  std::uint64_t rff = 0;
  std::uint64_t mask = 0;

  // topology = s, noise = s + 1, rff = s + 2, mask = s + 3
  static Seeds from_base(std::uint64_t s);
};

// Which candidate faces the forecasting model uses. `kTruth` needs a
// synthetic stream or a truth file; `kAuto` picks the truth when one is
// available and every face otherwise.
enum class ActivationMode { kAuto, kAll, kNone, kTruth, kList };

struct RunConfig {
  ComplexSource complex_source = ComplexSource::kBuiltin;
  std::filesystem::path complex_path;
  std::size_t edge_nodes = 0;  // 0 infers the node count
  std::vector<Edge> edges;
  std::size_t max_cycle_len = kDefaultMaxCycleLength;
  std::size_t pool_cap = kDefaultPoolCap;

  ModelSettings model;
  LearningRates rates;
  double gradient_clip = 1.0;  // per parameter group; 0 disables
  double p0_scale = 1.0;
  bool joseph = false;

  StreamSource stream_source = StreamSource::kSynthetic;
  std::filesystem::path stream_path;
  GeneratorSettings generator;  // length and cell ratio live here

  double p_stab = 0.1;
  double missing_rate = 0.0;
  std::optional<Seeds> seeds;

  ActivationMode activation = ActivationMode::kAuto;
  std::vector<std::size_t> activation_list;
  std::filesystem::path truth_path;  // {"activation": [...]} for external data

  double warmup_fraction = 0.1;
  double epsilon = 0.0;

  // Throws ConfigError when a value is out of range.
  void validate() const;
  const Seeds& require_seeds() const;
};

// Parses a config document; missing keys keep their defaults and unknown
// keys are rejected. Relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Human-readable description of the accepted keys.
std::string config_schema();

std::vector<std::uint8_t> load_truth(const std::filesystem::path& path);
void save_truth(const std::vector<std::uint8_t>& truth, const std::filesystem::path& path);

}  // namespace tkf
