#include "tkf/checkpoint.hpp"

#include "tkf/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace tkf {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw ConfigError("checkpoint matrix shape does not match its data");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

Checkpoint capture_checkpoint(const Tkf& filter) {
  return {filter.params(), filter.state(), filter.complex().activation()};
}

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  const ModelParams& p = cp.params;
  json banks = json::array();
  for (const auto& b : p.filter_bank.banks) banks.push_back({{"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}});
  json doc = {
      {"model",
       {{"c", p.c},
        {"delta_t", p.delta_t},
        {"gamma_reg", p.gamma_reg},
        {"sigma_obs", p.sigma_obs},
        {"alpha", vector_json(p.alpha)},
        {"filter_bank", banks},
        {"rff",
         {{"frequencies", vector_json(p.rff.frequencies())},
          {"kernel_bandwidth", p.rff.kernel_bandwidth()},
          {"seed", p.rff.seed()}}},
        {"gamma_coeffs", matrix_json(p.gamma_coeffs)}}},
      {"state", {{"step", cp.state.step}, {"x", vector_json(cp.state.x_post)}, {"p", matrix_json(cp.state.p_post)}}},
      {"activation", cp.activation},
  };
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << doc.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  try {
    json doc;
    in >> doc;
    Checkpoint cp;
    const json& m = doc.at("model");
    ModelParams& p = cp.params;
    p.c = m.at("c").get<double>();
    p.delta_t = m.at("delta_t").get<double>();
    p.gamma_reg = m.at("gamma_reg").get<double>();
    p.sigma_obs = m.at("sigma_obs").get<double>();
    p.alpha = vector_from(m.at("alpha"));
    const json& banks = m.at("filter_bank");
    if (banks.size() != kNumBanks) throw ConfigError("checkpoint must hold one tap bank per block");
    for (std::size_t i = 0; i < kNumBanks; ++i) {
      p.filter_bank.banks[i].lower = vector_from(banks[i].at("lower"));
      p.filter_bank.banks[i].upper = vector_from(banks[i].at("upper"));
    }
    const json& rff = m.at("rff");
    p.rff = RffMap(vector_from(rff.at("frequencies")), rff.at("kernel_bandwidth").get<double>(),
                   rff.at("seed").get<std::uint64_t>());
    p.gamma_coeffs = matrix_from(m.at("gamma_coeffs"));
    p.validate();

    const json& s = doc.at("state");
    cp.state.step = s.at("step").get<long>();
    cp.state.x_post = vector_from(s.at("x"));
    cp.state.p_post = matrix_from(s.at("p"));
    cp.activation = doc.at("activation").get<std::vector<std::uint8_t>>();
    return cp;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

Tkf resume_filter(CellComplex complex, const Checkpoint& cp, const TkfOptions& options) {
  complex.set_activation(cp.activation);
  return Tkf(std::move(complex), cp.params, cp.state, options);
}

}  // namespace tkf
