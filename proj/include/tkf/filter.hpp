#pragma once

#include "tkf/metrics.hpp"
#include "tkf/model.hpp"
#include "tkf/spectral.hpp"
#include "tkf/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tkf {

struct FilterState {
  Eigen::VectorXd x_post;
  Eigen::MatrixXd p_post;
  long step = 0;

  // x = 0, P = p0_scale * I
  static FilterState initial(std::size_t n, double p0_scale = 1.0);
};

struct Prior {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;
};

struct StepRecord {
  ObservationMask mask;
  Eigen::VectorXd observation;     // y restricted to the mask
  Eigen::VectorXd predicted;       // mu = y_hat(x_prior)
  Eigen::VectorXd residual;        // y - mu
  Eigen::MatrixXd innovation_cov;  // S
  Eigen::MatrixXd innovation_inv;  // S^-1
  Eigen::MatrixXd jacobian;        // J at the prior
  double log_det = 0.0;            // log|S|
  double gain_norm = 0.0;          // Frobenius norm of K
  double loss = 0.0;
};

// x_prior = Lt x_post, P_prior = Lt P_post Lt^T + Q
Prior predict(const FilterState& state, const Eigen::MatrixXd& transition, const Eigen::MatrixXd& q);

struct Correction {
  FilterState posterior;
  StepRecord record;
};

// EKF measurement update linearised at the prior. `y` holds only the masked
// entries. The posterior covariance is symmetrised; `joseph` switches to the
// Joseph-form update. Throws SingularInnovation when S stays
// ill-conditioned (reciprocal condition below 1e-12) after one 1e-9 jitter.
Correction correct(const Prior& prior, const Eigen::VectorXd& y, const ModelParams& model,
                   const ObservationMask& mask, const Eigen::MatrixXd& m_op, bool joseph = false);

// 1/2 log|S| + 1/2 r^T S^-1 r
double step_loss(const StepRecord& record);

struct LearningRates {
  double alpha = 1e-3;
  double taps = 1e-3;
  double gamma = 1e-3;
};

struct LossGradient {
  Eigen::VectorXd alpha;
  FilterBank taps;
  Eigen::MatrixXd gamma;

  bool finite() const;
  // Rescales each parameter group whose Euclidean norm exceeds `max_norm`.
  // A non-positive bound disables clipping.
  void clip(double max_norm);
};

// Gradient of the one-step loss with the previous posterior held fixed:
// theta enters through Q(alpha) in P_prior and through M(h), Gamma in mu
// and J. `m_op` must be basis.assemble(model.filter_bank).
LossGradient loss_gradient(const ModelParams& model, const TopoOperators& ops, const ObservationBasis& basis,
                           const Eigen::MatrixXd& m_op, const Prior& prior, const StepRecord& record);

// The same loss evaluated forward from the previous posterior. Used for
// finite-difference checks.
double predictive_loss(const ModelParams& model, const TopoOperators& ops, const FilterState& previous,
                       const ObservationMask& mask, const Eigen::VectorXd& y);

// One SGD step. Throws NonFiniteGradient and leaves `model` untouched when
// any gradient entry is not finite.
void m_step(ModelParams& model, const LossGradient& gradient, const LearningRates& rates);

struct TkfOptions {
  LearningRates rates;
  double gradient_clip = 1.0;
  bool learn = true;
  bool joseph = false;
};

// Deep copy of everything a step mutates.
struct Snapshot {
  FilterState state;
  Eigen::VectorXd alpha;
  FilterBank taps;
  Eigen::MatrixXd gamma;
  std::vector<std::uint8_t> activation;
};

struct StepOutcome {
  Eigen::VectorXd forecast;  // M (x_prior + f_hat(x_prior)) for every component
  double loss = 0.0;         // NaN when nothing was observed
  double innovation_norm = 0.0;
  double gain_norm = 0.0;
  int observed = 0;
  bool update_skipped = false;  // M-step aborted on a non-finite gradient
};

// Topological Kalman filter: predict, correct, then one online M-step per
// observation. Operators are rebuilt whenever the activation changes.
class Tkf {
 public:
  Tkf(CellComplex complex, ModelParams params, FilterState initial, TkfOptions options = {});

  // `y` has length N; NaN marks a missing entry.
  StepOutcome step(const Eigen::VectorXd& y);

  void set_activation(const std::vector<std::uint8_t>& activation);
  void set_active(std::size_t face, bool active);

  Snapshot snapshot() const;
  void restore(const Snapshot& snap);

  const CellComplex& complex() const { return complex_; }
  const TopoOperators& operators() const { return ops_; }
  const ObservationBasis& observation_basis() const { return basis_; }
  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  const FilterState& state() const { return state_; }
  FilterState& state() { return state_; }
  const TkfOptions& options() const { return options_; }
  std::size_t dimension() const { return complex_.dimension(); }

 private:
  void rebuild();

  CellComplex complex_;
  ModelParams params_;
  FilterState state_;
  TkfOptions options_;
  TopoOperators ops_;
  ObservationBasis basis_;
  Eigen::MatrixXd transition_;
};

struct StepLog {
  long step = 0;
  double loss = 0.0;
  double nmse = 0.0;  // NaN before the stabilisation step
  double innovation_norm = 0.0;
  int observed = 0;
};

struct RunReport {
  std::vector<StepLog> steps;
  Eigen::MatrixXd forecasts;  // T x N
  Eigen::MatrixXd estimates;  // T x N posterior means
  std::size_t stabilization_step = 0;
  double final_nmse = 0.0;
  int skipped_updates = 0;
};

// ceil(p_stab * T)
std::size_t stabilization_step(double p_stab, std::size_t length);

// Algorithm loop over the rows of `observations` (T x N, NaN = missing).
// NMSE accumulates over observed entries from `stabilization` onwards.
// Numerical failures are rethrown as StepFailure carrying the step index.
RunReport run_tkf(Tkf& filter, const Eigen::MatrixXd& observations, std::size_t stabilization);

}  // namespace tkf
