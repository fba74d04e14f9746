#include "tkf/synthetic.hpp"

#include "tkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tkf {

namespace {

FaceCycle walk(const std::vector<Edge>& edges, const std::vector<int>& nodes) {
  FaceCycle cycle;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int a = nodes[i];
    const int b = nodes[(i + 1) % nodes.size()];
    for (std::size_t j = 0; j < edges.size(); ++j) {
      if (edges[j].tail == a && edges[j].head == b) cycle.push_back({static_cast<int>(j), 1});
      if (edges[j].tail == b && edges[j].head == a) cycle.push_back({static_cast<int>(j), -1});
    }
  }
  return cycle;
}

}  // namespace

CellComplex builtin_complex() {
  const std::vector<Edge> edges = {
      {0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},  // bottom pentagon
      {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 5},  // top pentagon
      {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},  // sides
      {0, 6}, {1, 7},                          // diagonals
  };
  const std::vector<std::vector<int>> node_cycles = {
      {0, 1, 2, 3, 4}, {5, 9, 8, 7, 6}, {0, 1, 6}, {0, 6, 5}, {1, 2, 7},
      {1, 7, 6},       {2, 3, 8, 7},    {3, 4, 9, 8}, {4, 0, 5, 9},
  };
  std::vector<FaceCycle> faces;
  for (const auto& nc : node_cycles) faces.push_back(walk(edges, nc));
  return build_complex(10, edges, faces);
}

ProcessNoiseSampler::ProcessNoiseSampler(const TopoOperators& ops, const Eigen::VectorXd& alpha, double delta_t) {
  if (alpha.size() != static_cast<Eigen::Index>(ops.dimension())) throw ShapeMismatch("alpha length must be N");
  factor_ = std::sqrt(delta_t) * ops.dirac * alpha.asDiagonal();
}

SyntheticData generate_synthetic(const CellComplex& pool, const GeneratorSettings& s, std::uint64_t topology_seed,
                                 std::uint64_t noise_seed) {
  if (s.length == 0) throw ConfigError("stream length must be positive");
  if (!(s.cell_ratio >= 0.0 && s.cell_ratio <= 1.0)) throw ConfigError("cell_ratio must lie in [0, 1]");
  if (!(s.sigma_o >= 0.0)) throw ConfigError("sigma_o must be non-negative");

  std::mt19937_64 topo_gen(topology_seed);
  SyntheticData data;
  data.complex = pool;

  const std::size_t n2 = pool.n_faces_pool();
  const auto n_true = static_cast<std::size_t>(std::lround(s.cell_ratio * static_cast<double>(n2)));
  std::vector<std::size_t> order(n2);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), topo_gen);
  data.truth.assign(n2, 0);
  for (std::size_t i = 0; i < n_true; ++i) data.truth[order[i]] = 1;
  data.complex.set_activation(data.truth);

  std::uniform_real_distribution<double> tap(-s.tap_range, s.tap_range);
  data.true_taps = FilterBank::zeros(s.lower_taps, s.upper_taps);
  for (auto& b : data.true_taps.banks) {
    for (Eigen::Index i = 0; i < b.lower.size(); ++i) b.lower(i) = tap(topo_gen);
    for (Eigen::Index i = 0; i < b.upper.size(); ++i) b.upper(i) = tap(topo_gen);
  }

  const TopoOperators ops = build_operators(data.complex);
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  const Eigen::MatrixXd lt = transition(ops, s.c, s.delta_t);
  const Eigen::MatrixXd m_op = observation_operator(ops, data.true_taps);
  const ProcessNoiseSampler process(ops, Eigen::VectorXd::Constant(n, s.sigma_p), s.delta_t);

  std::mt19937_64 noise_gen(noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(s.length), n);
  Eigen::MatrixXd latent(static_cast<Eigen::Index>(s.length), n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(s.length); ++t) {
    x = lt * x + process(noise_gen);
    Eigen::VectorXd obs = s.amplitude * (m_op * x.array().cos().matrix());
    for (Eigen::Index i = 0; i < n; ++i) obs(i) += s.sigma_o * normal(noise_gen);
    latent.row(t) = x.transpose();
    y.row(t) = obs.transpose();
  }
  data.stream.observations = std::move(y);
  data.stream.latent = std::move(latent);
  return data;
}

}  // namespace tkf
