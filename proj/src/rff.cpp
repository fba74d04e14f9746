#include "tkf/rff.hpp"

#include "tkf/errors.hpp"

#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace tkf {

RffMap::RffMap(int m, double kernel_bandwidth, std::uint64_t seed)
    : kernel_bandwidth_(kernel_bandwidth), seed_(seed) {
  if (m < 1) throw ConfigError("RFF feature count must be positive");
  if (!(kernel_bandwidth > 0.0)) throw ConfigError("kernel bandwidth must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> draw(0.0, 1.0 / kernel_bandwidth);
  frequencies_.resize(m);
  for (int i = 0; i < m; ++i) frequencies_(i) = draw(gen);
}

RffMap::RffMap(Eigen::VectorXd frequencies, double kernel_bandwidth, std::uint64_t seed)
    : frequencies_(std::move(frequencies)), kernel_bandwidth_(kernel_bandwidth), seed_(seed) {
  if (frequencies_.size() < 1) throw ConfigError("RFF feature count must be positive");
}

Eigen::VectorXd RffMap::feature_map(double x) const {
  const Eigen::Index m = frequencies_.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::VectorXd z(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = frequencies_(i) * x;
    z(i) = scale * std::sin(a);
    z(m + i) = scale * std::cos(a);
  }
  return z;
}

Eigen::VectorXd RffMap::feature_derivative(double x) const {
  const Eigen::Index m = frequencies_.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::VectorXd dz(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = frequencies_(i);
    dz(i) = scale * v * std::cos(v * x);
    dz(m + i) = -scale * v * std::sin(v * x);
  }
  return dz;
}

namespace {

void check_shape(const RffMap& rff, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& x) {
  if (gamma.rows() != x.size() || gamma.cols() != rff.feature_size()) {
    throw ShapeMismatch("gamma is " + std::to_string(gamma.rows()) + "x" + std::to_string(gamma.cols()) +
                        ", expected " + std::to_string(x.size()) + "x" + std::to_string(rff.feature_size()));
  }
}

}  // namespace

Eigen::VectorXd f_hat(const RffMap& rff, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& x) {
  check_shape(rff, gamma, x);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index n = 0; n < x.size(); ++n) out(n) = gamma.row(n).dot(rff.feature_map(x(n)));
  return out;
}

Eigen::VectorXd f_hat_derivative(const RffMap& rff, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& x) {
  check_shape(rff, gamma, x);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index n = 0; n < x.size(); ++n) out(n) = gamma.row(n).dot(rff.feature_derivative(x(n)));
  return out;
}

}  // namespace tkf
