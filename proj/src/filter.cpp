#include "tkf/filter.hpp"

#include "tkf/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace tkf {

FilterState FilterState::initial(std::size_t n, double p0_scale) {
  const auto size = static_cast<Eigen::Index>(n);
  return {Eigen::VectorXd::Zero(size), p0_scale * Eigen::MatrixXd::Identity(size, size), 0};
}

Prior predict(const FilterState& state, const Eigen::MatrixXd& transition, const Eigen::MatrixXd& q) {
  Prior prior;
  prior.x = transition * state.x_post;
  prior.p = transition * state.p_post * transition.transpose() + q;
  prior.p = 0.5 * (prior.p + prior.p.transpose()).eval();
  return prior;
}

namespace {

constexpr double kMinReciprocalCondition = 1e-12;
constexpr double kJitter = 1e-9;

Eigen::LLT<Eigen::MatrixXd> factor_innovation(Eigen::MatrixXd& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success && llt.rcond() >= kMinReciprocalCondition) return llt;
  s.diagonal().array() += kJitter;
  llt.compute(s);
  if (llt.info() != Eigen::Success || llt.rcond() < kMinReciprocalCondition) {
    throw SingularInnovation("innovation covariance is singular or ill-conditioned; check sigma_obs");
  }
  return llt;
}

}  // namespace

Correction correct(const Prior& prior, const Eigen::VectorXd& y, const ModelParams& model,
                   const ObservationMask& mask, const Eigen::MatrixXd& m_op, bool joseph) {
  if (y.size() != static_cast<Eigen::Index>(mask.size())) throw ShapeMismatch("observation length does not match the mask");
  const auto n = prior.x.size();
  const auto no = static_cast<Eigen::Index>(mask.size());

  Correction out;
  StepRecord& rec = out.record;
  rec.mask = mask;
  rec.observation = y;
  rec.predicted = predict_obs(model, mask, m_op, prior.x);
  rec.residual = y - rec.predicted;
  rec.jacobian = jacobian(model, mask, m_op, prior.x);

  const Eigen::MatrixXd pjt = prior.p * rec.jacobian.transpose();
  rec.innovation_cov = rec.jacobian * pjt;
  rec.innovation_cov.diagonal().array() += model.sigma_obs * model.sigma_obs;
  rec.innovation_cov = 0.5 * (rec.innovation_cov + rec.innovation_cov.transpose()).eval();

  const auto llt = factor_innovation(rec.innovation_cov);
  rec.innovation_inv = llt.solve(Eigen::MatrixXd::Identity(no, no));
  rec.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  const Eigen::MatrixXd gain = pjt * rec.innovation_inv;
  rec.gain_norm = gain.norm();

  out.posterior.x_post = prior.x + gain * rec.residual;
  const Eigen::MatrixXd ikj = Eigen::MatrixXd::Identity(n, n) - gain * rec.jacobian;
  if (joseph) {
    out.posterior.p_post = ikj * prior.p * ikj.transpose() +
                           (model.sigma_obs * model.sigma_obs) * gain * gain.transpose();
  } else {
    out.posterior.p_post = ikj * prior.p;
  }
  out.posterior.p_post = 0.5 * (out.posterior.p_post + out.posterior.p_post.transpose()).eval();
  rec.loss = step_loss(rec);
  return out;
}

double step_loss(const StepRecord& record) {
  const double quad = record.residual.dot(record.innovation_inv * record.residual);
  return 0.5 * record.log_det + 0.5 * quad;
}

bool LossGradient::finite() const {
  return alpha.allFinite() && gamma.allFinite() && taps.flatten().allFinite();
}

void LossGradient::clip(double max_norm) {
  if (!(max_norm > 0.0)) return;
  const auto scale = [max_norm](double norm) { return norm > max_norm ? max_norm / norm : 1.0; };
  alpha *= scale(alpha.norm());
  gamma *= scale(gamma.norm());
  const Eigen::VectorXd flat = taps.flatten();
  taps.assign(flat * scale(flat.norm()));
}

LossGradient loss_gradient(const ModelParams& model, const TopoOperators& ops, const ObservationBasis& basis,
                           const Eigen::MatrixXd& m_op, const Prior& prior, const StepRecord& record) {
  const Eigen::MatrixXd& j = record.jacobian;
  const Eigen::MatrixXd& s_inv = record.innovation_inv;
  const Eigen::VectorXd v = s_inv * record.residual;
  // dl = 1/2 tr(W dS) - v^T dmu with W = S^-1 - v v^T
  const Eigen::MatrixXd w = s_inv - v * v.transpose();
  const Eigen::MatrixXd wj = w * j;
  const Eigen::MatrixXd grad_j = wj * prior.p;                 // dl/dJ
  const Eigen::MatrixXd grad_p = 0.5 * j.transpose() * wj;     // dl/dP_prior

  LossGradient g;

  // P_prior = ... + dt D diag(alpha^2) D^T
  const Eigen::MatrixXd& d = ops.dirac;
  const Eigen::VectorXd dpd = (grad_p * d).cwiseProduct(d).colwise().sum().transpose();
  g.alpha = 2.0 * model.delta_t * model.alpha.cwiseProduct(dpd);

  // mu = A u and J = A diag(1 + f'), A = Phi M
  const Eigen::VectorXd& x = prior.x;
  const Eigen::VectorXd fprime = f_hat_derivative(model.rff, model.gamma_coeffs, x);
  const Eigen::VectorXd u = x + f_hat(model.rff, model.gamma_coeffs, x);
  const Eigen::MatrixXd a_rows = record.mask.select_rows(m_op);
  const Eigen::VectorXd grad_u = -(a_rows.transpose() * v);
  const Eigen::VectorXd grad_fprime = grad_j.cwiseProduct(a_rows).colwise().sum().transpose();

  g.gamma.resize(model.gamma_coeffs.rows(), model.gamma_coeffs.cols());
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    g.gamma.row(n) = grad_u(n) * model.rff.feature_map(x(n)).transpose() +
                     grad_fprime(n) * model.rff.feature_derivative(x(n)).transpose();
  }

  // dl/dA, scattered back to full rows of M
  const Eigen::MatrixXd grad_a =
      -v * u.transpose() + grad_j * (Eigen::VectorXd::Ones(x.size()) + fprime).asDiagonal();
  Eigen::MatrixXd grad_m = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (std::size_t r = 0; r < record.mask.size(); ++r) {
    grad_m.row(record.mask.indices[r]) = grad_a.row(static_cast<Eigen::Index>(r));
  }
  g.taps = basis.project(grad_m);
  return g;
}

double predictive_loss(const ModelParams& model, const TopoOperators& ops, const FilterState& previous,
                       const ObservationMask& mask, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd lt = transition(ops, model.c, model.delta_t);
  const Eigen::MatrixXd q = process_cov(ops, model.alpha, model.delta_t, model.gamma_reg);
  const Prior prior = predict(previous, lt, q);
  const Eigen::MatrixXd m_op = observation_operator(ops, model.filter_bank);
  return correct(prior, y, model, mask, m_op).record.loss;
}

void m_step(ModelParams& model, const LossGradient& gradient, const LearningRates& rates) {
  if (!gradient.finite()) throw NonFiniteGradient("M-step gradient has non-finite entries");
  model.alpha -= rates.alpha * gradient.alpha;
  Eigen::VectorXd taps = model.filter_bank.flatten();
  taps -= rates.taps * gradient.taps.flatten();
  model.filter_bank.assign(taps);
  model.gamma_coeffs -= rates.gamma * gradient.gamma;
}

Tkf::Tkf(CellComplex complex, ModelParams params, FilterState initial, TkfOptions options)
    : complex_(std::move(complex)), params_(std::move(params)), state_(std::move(initial)), options_(options) {
  params_.validate();
  const auto n = static_cast<Eigen::Index>(complex_.dimension());
  if (params_.alpha.size() != n) throw ShapeMismatch("model dimension does not match the complex");
  if (state_.x_post.size() != n || state_.p_post.rows() != n || state_.p_post.cols() != n) {
    throw ShapeMismatch("initial filter state does not match the complex");
  }
  rebuild();
}

void Tkf::rebuild() {
  ops_ = build_operators(complex_);
  basis_ = ObservationBasis(ops_, params_.filter_bank.lower_length(), params_.filter_bank.upper_length());
  transition_ = transition(ops_, params_.c, params_.delta_t);
}

void Tkf::set_activation(const std::vector<std::uint8_t>& activation) {
  complex_.set_activation(activation);
  rebuild();
}

void Tkf::set_active(std::size_t face, bool active) {
  complex_.set_active(face, active);
  rebuild();
}

Snapshot Tkf::snapshot() const {
  return {state_, params_.alpha, params_.filter_bank, params_.gamma_coeffs, complex_.activation()};
}

void Tkf::restore(const Snapshot& snap) {
  state_ = snap.state;
  params_.alpha = snap.alpha;
  params_.filter_bank = snap.taps;
  params_.gamma_coeffs = snap.gamma;
  if (snap.activation != complex_.activation()) set_activation(snap.activation);
}

StepOutcome Tkf::step(const Eigen::VectorXd& y) {
  const auto n = static_cast<Eigen::Index>(dimension());
  if (y.size() != n) throw ShapeMismatch("observation vector length does not match N");

  const Eigen::MatrixXd q = process_cov(ops_, params_.alpha, params_.delta_t, params_.gamma_reg);
  const Prior prior = predict(state_, transition_, q);
  const Eigen::MatrixXd m_op = basis_.assemble(params_.filter_bank);

  StepOutcome out;
  out.forecast = m_op * (prior.x + f_hat(params_.rff, params_.gamma_coeffs, prior.x));

  ObservationMask mask;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isnan(y(i))) mask.indices.push_back(static_cast<int>(i));
  }
  out.observed = static_cast<int>(mask.size());
  if (mask.size() == 0) {
    state_ = {prior.x, prior.p, state_.step + 1};
    out.loss = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  Correction c = correct(prior, mask.select(y), params_, mask, m_op, options_.joseph);
  out.loss = c.record.loss;
  out.innovation_norm = c.record.residual.norm();
  out.gain_norm = c.record.gain_norm;

  if (options_.learn) {
    LossGradient g = loss_gradient(params_, ops_, basis_, m_op, prior, c.record);
    if (g.finite()) g.clip(options_.gradient_clip);
    try {
      m_step(params_, g, options_.rates);
    } catch (const NonFiniteGradient&) {
      out.update_skipped = true;
    }
  }
  c.posterior.step = state_.step + 1;
  state_ = std::move(c.posterior);
  return out;
}

std::size_t stabilization_step(double p_stab, std::size_t length) {
  if (!(p_stab >= 0.0 && p_stab < 1.0)) throw ConfigError("p_stab must lie in [0, 1)");
  return static_cast<std::size_t>(std::ceil(p_stab * static_cast<double>(length)));
}

RunReport run_tkf(Tkf& filter, const Eigen::MatrixXd& observations, std::size_t stabilization) {
  const auto n = static_cast<Eigen::Index>(filter.dimension());
  if (observations.cols() != n) throw ShapeMismatch("stream width does not match the complex dimension");
  const Eigen::Index t_len = observations.rows();

  RunReport report;
  report.stabilization_step = stabilization;
  report.forecasts.resize(t_len, n);
  report.estimates.resize(t_len, n);
  NmseAccumulator acc(static_cast<std::size_t>(n));

  for (Eigen::Index t = 0; t < t_len; ++t) {
    const Eigen::VectorXd y = observations.row(t).transpose();
    StepOutcome o;
    try {
      o = filter.step(y);
    } catch (const NumericalError& e) {
      throw StepFailure(static_cast<long>(t), e.what());
    }
    if (o.update_skipped) ++report.skipped_updates;
    report.forecasts.row(t) = o.forecast.transpose();
    report.estimates.row(t) = filter.state().x_post.transpose();

    StepLog log;
    log.step = static_cast<long>(t);
    log.loss = o.loss;
    log.innovation_norm = o.innovation_norm;
    log.observed = o.observed;
    if (static_cast<std::size_t>(t) >= stabilization) {
      acc.add(y, o.forecast);
      log.nmse = acc.value();
    } else {
      log.nmse = std::numeric_limits<double>::quiet_NaN();
    }
    report.steps.push_back(log);
  }
  report.final_nmse = acc.empty() ? std::numeric_limits<double>::quiet_NaN() : acc.value();
  return report;
}

}  // namespace tkf
