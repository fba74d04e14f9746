#include "tkf/cellid.hpp"

#include "tkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tkf {

std::vector<double> uncertainty_scores(const CellComplex& cc, const Eigen::VectorXd& alpha) {
  if (alpha.size() != static_cast<Eigen::Index>(cc.dimension())) throw ShapeMismatch("alpha length must be N");
  const auto offset = static_cast<Eigen::Index>(cc.n_nodes());
  std::vector<double> xi(cc.n_faces_pool(), 0.0);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const std::vector<int> edges = cc.boundary_edges(k);
    double sum = 0.0;
    for (int e : edges) sum += alpha(offset + e) * alpha(offset + e);
    xi[k] = sum / static_cast<double>(edges.size());
  }
  return xi;
}

std::vector<std::size_t> candidate_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::size_t warmup_steps(double fraction, std::size_t length) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("warm-up fraction must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(length)));
}

namespace {

struct WindowResult {
  double nmse = 0.0;
  int skipped = 0;
};

WindowResult run_window(Tkf& filter, const Eigen::MatrixXd& obs, std::size_t begin, std::size_t end,
                        Eigen::MatrixXd& forecasts) {
  NmseAccumulator acc(filter.dimension());
  WindowResult out;
  for (std::size_t t = begin; t < end; ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    const Eigen::VectorXd y = obs.row(row).transpose();
    StepOutcome o;
    try {
      o = filter.step(y);
    } catch (const NumericalError& e) {
      throw StepFailure(static_cast<long>(t), e.what());
    }
    if (o.update_skipped) ++out.skipped;
    forecasts.row(row) = o.forecast.transpose();
    acc.add(y, o.forecast);
  }
  out.nmse = acc.empty() ? std::numeric_limits<double>::quiet_NaN() : acc.value();
  return out;
}

}  // namespace

IdentificationReport identify_cells(Tkf& filter, const Eigen::MatrixXd& observations, const IdentifyConfig& config) {
  const std::size_t n2 = filter.complex().n_faces_pool();
  const auto t_len = static_cast<std::size_t>(observations.rows());
  if (observations.cols() != static_cast<Eigen::Index>(filter.dimension())) {
    throw ShapeMismatch("stream width does not match the complex dimension");
  }
  if (config.warmup >= t_len) throw InsufficientStream("warm-up must be shorter than the stream");
  if (t_len - config.warmup < n2) {
    throw InsufficientStream("stream leaves fewer than one step per candidate after warm-up");
  }

  IdentificationReport report;
  report.warmup = config.warmup;
  report.epsilon = config.epsilon;
  report.forecasts = Eigen::MatrixXd::Constant(observations.rows(), observations.cols(),
                                               std::numeric_limits<double>::quiet_NaN());

  filter.set_activation(std::vector<std::uint8_t>(n2, 0));
  const WindowResult warm = run_window(filter, observations, 0, config.warmup, report.forecasts);
  report.skipped_updates += warm.skipped;
  report.warmup_nmse = warm.nmse;
  double benchmark = warm.nmse;

  if (n2 == 0) {
    report.activation = filter.complex().activation();
    return report;
  }

  const std::vector<double> xi = uncertainty_scores(filter.complex(), filter.params().alpha);
  const std::vector<std::size_t> order = candidate_order(xi);
  const std::size_t width = (t_len - config.warmup) / n2;

  for (std::size_t p = 0; p < n2; ++p) {
    CandidateDecision d;
    d.cell = order[p];
    d.score = xi[d.cell];
    d.window_begin = config.warmup + p * width;
    d.window_end = p + 1 == n2 ? t_len : d.window_begin + width;
    d.benchmark = benchmark;

    const Snapshot snap = filter.snapshot();
    filter.set_active(d.cell, true);
    const WindowResult trial = run_window(filter, observations, d.window_begin, d.window_end, report.forecasts);
    d.window_nmse = trial.nmse;
    // NaN on either side (no observed energy) never counts as an improvement.
    d.accepted = trial.nmse / benchmark - 1.0 < config.epsilon;
    if (d.accepted) {
      benchmark = trial.nmse;
      report.skipped_updates += trial.skipped;
    } else {
      filter.restore(snap);
      const WindowResult replay = run_window(filter, observations, d.window_begin, d.window_end, report.forecasts);
      report.skipped_updates += replay.skipped;
    }
    report.decisions.push_back(d);
  }
  report.activation = filter.complex().activation();
  return report;
}

}  // namespace tkf
