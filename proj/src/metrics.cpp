#include "tkf/metrics.hpp"

#include "tkf/errors.hpp"

#include <cmath>

namespace tkf {

void NmseAccumulator::add(const Eigen::VectorXd& observed, const Eigen::VectorXd& forecast) {
  if (observed.size() != error_.size() || forecast.size() != error_.size()) {
    throw ShapeMismatch("NMSE accumulator received a vector of the wrong length");
  }
  for (Eigen::Index n = 0; n < observed.size(); ++n) {
    const double y = observed(n);
    if (std::isnan(y)) continue;
    const double d = y - forecast(n);
    error_(n) += d * d;
    energy_(n) += y * y;
  }
  ++samples_;
}

double NmseAccumulator::value() const {
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index n = 0; n < error_.size(); ++n) {
    if (energy_(n) > 0.0) {
      sum += error_(n) / energy_(n);
      ++count;
    }
  }
  return count ? sum / count : 0.0;
}

double nmse(const Eigen::MatrixXd& observations, const Eigen::MatrixXd& forecasts, std::size_t start) {
  if (observations.rows() != forecasts.rows() || observations.cols() != forecasts.cols()) {
    throw ShapeMismatch("observation and forecast matrices differ in shape");
  }
  NmseAccumulator acc(static_cast<std::size_t>(observations.cols()));
  for (auto t = static_cast<Eigen::Index>(start); t < observations.rows(); ++t) {
    acc.add(observations.row(t).transpose(), forecasts.row(t).transpose());
  }
  return acc.value();
}

double ConfusionMetrics::accuracy() const {
  const int total = true_positive + false_positive + true_negative + false_negative;
  return total ? static_cast<double>(true_positive + true_negative) / total : 0.0;
}

double ConfusionMetrics::precision() const {
  const int d = true_positive + false_positive;
  return d ? static_cast<double>(true_positive) / d : 0.0;
}

double ConfusionMetrics::recall() const {
  const int d = true_positive + false_negative;
  return d ? static_cast<double>(true_positive) / d : 0.0;
}

double ConfusionMetrics::f1() const {
  const double p = precision();
  const double r = recall();
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

ConfusionMetrics confusion(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth) {
  if (truth.empty() && !predicted.empty()) throw MissingGroundTruth("identification metrics need a truth activation");
  if (predicted.size() != truth.size()) throw ShapeMismatch("predicted and true activations differ in length");
  ConfusionMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++m.true_positive;
    else if (p && !t) ++m.false_positive;
    else if (!p && t) ++m.false_negative;
    else ++m.true_negative;
  }
  return m;
}

}  // namespace tkf
