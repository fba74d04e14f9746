#pragma once

#include "tkf/model.hpp"
#include "tkf/stream.hpp"
#include "tkf/topology.hpp"

#include <cstdint>
#include <vector>

namespace tkf {

// Canonical 10-node / 17-edge / 9-cell complex used by the synthetic
// experiments: a pentagonal prism with two of its side squares split into
// triangles. The 9 faces close into a sphere, so rank(B2) = 8.
CellComplex builtin_complex();

struct GeneratorSettings {
  std::size_t length = 1000;
  double c = 0.5;
  double delta_t = 0.1;
  double sigma_p = 1.0;     // alpha = sigma_p * 1
  double sigma_o = 1.0;     // observation noise std
  double amplitude = 10.0;  // y = amplitude * M cos(x) + n
  double tap_range = 0.5;   // true taps ~ U[-tap_range, tap_range]
  int lower_taps = 3;
  int upper_taps = 3;
  double cell_ratio = 1.0;  // fraction of pool faces active in the truth
};

struct SyntheticData {
  CellComplex complex;                  // full candidate pool, truth activation applied
  std::vector<std::uint8_t> truth;      // ground-truth activation
  FilterBank true_taps;
  ObservationStream stream;             // observations plus latent ground truth
};

// Draws the true activation (round(cell_ratio * N2) faces) and true taps
// from `topology_seed`, then simulates x_i = Lt x_{i-1} + q_i from x_0 = 0
// with q_i = sqrt(dt) D diag(alpha) w_i, and y_i = amplitude * M cos(x_i) + n_i,
// all noise drawn from `noise_seed`.
SyntheticData generate_synthetic(const CellComplex& pool, const GeneratorSettings& settings,
                                 std::uint64_t topology_seed, std::uint64_t noise_seed);

// One draw of q ~ N(0, Q(alpha)) with the regulariser omitted.
class ProcessNoiseSampler {
 public:
  ProcessNoiseSampler(const TopoOperators& ops, const Eigen::VectorXd& alpha, double delta_t);
  template <class Gen>
  Eigen::VectorXd operator()(Gen& gen) const;

 private:
  Eigen::MatrixXd factor_;  // sqrt(dt) D diag(alpha)
};

}  // namespace tkf

#include <random>

template <class Gen>
Eigen::VectorXd tkf::ProcessNoiseSampler::operator()(Gen& gen) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd w(factor_.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(gen);
  return factor_ * w;
}
