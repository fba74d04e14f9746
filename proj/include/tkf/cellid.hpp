#pragma once

#include "tkf/filter.hpp"
#include "tkf/metrics.hpp"
#include "tkf/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace tkf {

// xi_k = mean of alpha_j^2 over the boundary edges of candidate k. `alpha`
// is the full length-N vector; the edge block starts at N0.
std::vector<double> uncertainty_scores(const CellComplex& cc, const Eigen::VectorXd& alpha);

// Candidate indices by descending score, ties by ascending index.
std::vector<std::size_t> candidate_order(const std::vector<double>& scores);

struct IdentifyConfig {
  std::size_t warmup = 0;  // T_s
  double epsilon = 0.0;
};

// floor(fraction * T)
std::size_t warmup_steps(double fraction, std::size_t length);

struct CandidateDecision {
  std::size_t cell = 0;
  double score = 0.0;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // exclusive
  double window_nmse = 0.0;
  double benchmark = 0.0;      // NMSE_min at decision time
  bool accepted = false;
};

struct IdentificationReport {
  std::size_t warmup = 0;
  double epsilon = 0.0;
  double warmup_nmse = 0.0;
  std::vector<CandidateDecision> decisions;  // in visiting order
  std::vector<std::uint8_t> activation;      // final e
  Eigen::MatrixXd forecasts;                 // committed forecasts, T x N
  int skipped_updates = 0;
  std::optional<ConfusionMetrics> metrics;
};

// Online identification over every face of the filter's candidate pool.
// The filter's activation is reset to all-zero first. On rejection the
// snapshot is restored and the window replayed (with M-step updates) under
// the pre-window topology. Throws InsufficientStream when T - T_s < N2.
IdentificationReport identify_cells(Tkf& filter, const Eigen::MatrixXd& observations, const IdentifyConfig& config);

}  // namespace tkf
