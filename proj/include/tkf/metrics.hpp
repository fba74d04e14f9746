#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tkf {

// Running per-component NMSE:
//   NMSE(t) = (1/N') sum_n [ sum_tau (y_n - yhat_n)^2 / sum_tau y_n^2 ]
// Only observed (finite) entries contribute, and N' counts the components
// whose denominator is nonzero so far.
class NmseAccumulator {
 public:
  NmseAccumulator() = default;
  explicit NmseAccumulator(std::size_t n) : error_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
                                            energy_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

  // NaN entries of `observed` are skipped.
  void add(const Eigen::VectorXd& observed, const Eigen::VectorXd& forecast);
  double value() const;
  bool empty() const { return samples_ == 0; }
  long samples() const { return samples_; }

 private:
  Eigen::VectorXd error_;
  Eigen::VectorXd energy_;
  long samples_ = 0;
};

// NMSE of a whole forecast matrix (rows are time steps) from row `start`.
double nmse(const Eigen::MatrixXd& observations, const Eigen::MatrixXd& forecasts, std::size_t start = 0);

struct ConfusionMetrics {
  int true_positive = 0;
  int false_positive = 0;
  int true_negative = 0;
  int false_negative = 0;

  double accuracy() const;
  // Ratios with an empty denominator are reported as 0.
  double precision() const;
  double recall() const;
  double f1() const;
};

// Binary classification of a predicted activation against the truth.
ConfusionMetrics confusion(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth);

}  // namespace tkf
