#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace tkf {

// Random Fourier features for a Gaussian kernel of bandwidth sigma_k.
// One frequency set is shared by every state component.
class RffMap {
 public:
  RffMap() = default;
  // Draws m frequencies i.i.d. from N(0, 1 / sigma_k^2).
  RffMap(int m, double kernel_bandwidth, std::uint64_t seed);
  // Explicit frequencies, e.g. for restoring a checkpoint.
  RffMap(Eigen::VectorXd frequencies, double kernel_bandwidth, std::uint64_t seed);

  int m() const { return static_cast<int>(frequencies_.size()); }
  int feature_size() const { return 2 * m(); }
  const Eigen::VectorXd& frequencies() const { return frequencies_; }
  double kernel_bandwidth() const { return kernel_bandwidth_; }
  std::uint64_t seed() const { return seed_; }

  // z(x) = [sin(v x), cos(v x)] / sqrt(M)
  Eigen::VectorXd feature_map(double x) const;
  // dz/dx = [v cos(v x), -v sin(v x)] / sqrt(M)
  Eigen::VectorXd feature_derivative(double x) const;

 private:
  Eigen::VectorXd frequencies_;
  double kernel_bandwidth_ = 1.0;
  std::uint64_t seed_ = 0;
};

// Row n of gamma (N x 2M) holds the coefficients of component n.
Eigen::VectorXd f_hat(const RffMap& rff, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& x);
// Diagonal of the Jacobian of f_hat.
Eigen::VectorXd f_hat_derivative(const RffMap& rff, const Eigen::MatrixXd& gamma, const Eigen::VectorXd& x);

}  // namespace tkf
