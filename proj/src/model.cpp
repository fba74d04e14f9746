#include "tkf/model.hpp"

#include "tkf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tkf {

FilterBank FilterBank::zeros(int lower_length, int upper_length) {
  if (lower_length < 1 || upper_length < 0) throw ConfigError("filter orders must be >= 1 (lower) and >= 0 (upper)");
  FilterBank fb;
  for (auto& b : fb.banks) {
    b.lower = Eigen::VectorXd::Zero(lower_length);
    b.upper = Eigen::VectorXd::Zero(upper_length);
  }
  return fb;
}

FilterBank FilterBank::identity(int lower_length, int upper_length) {
  FilterBank fb = zeros(lower_length, upper_length);
  for (std::size_t b = 0; b < kNumBanks; ++b) {
    if (kBanks[b].row == kBanks[b].col) fb.banks[b].lower(0) = 1.0;
  }
  return fb;
}

Eigen::VectorXd FilterBank::flatten() const {
  Eigen::VectorXd flat(parameter_count());
  Eigen::Index at = 0;
  for (const auto& b : banks) {
    flat.segment(at, b.lower.size()) = b.lower;
    at += b.lower.size();
    flat.segment(at, b.upper.size()) = b.upper;
    at += b.upper.size();
  }
  return flat;
}

void FilterBank::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != parameter_count()) throw ShapeMismatch("flattened tap vector has the wrong length");
  Eigen::Index at = 0;
  for (auto& b : banks) {
    b.lower = flat.segment(at, b.lower.size());
    at += b.lower.size();
    b.upper = flat.segment(at, b.upper.size());
    at += b.upper.size();
  }
}

void ModelParams::validate() const {
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (!(delta_t > 0.0)) throw ConfigError("delta_t must be positive");
  if (!(gamma_reg >= 0.0)) throw ConfigError("gamma_reg must be non-negative");
  if (!(sigma_obs > 0.0)) throw ConfigError("sigma_obs must be positive");
  for (const auto& b : filter_bank.banks) {
    if (b.lower.size() != filter_bank.lower_length() || b.upper.size() != filter_bank.upper_length()) {
      throw ShapeMismatch("all filter banks must share tap lengths");
    }
  }
  if (gamma_coeffs.rows() != alpha.size() || gamma_coeffs.cols() != rff.feature_size()) {
    throw ShapeMismatch("gamma must be N x 2M");
  }
}

ModelParams make_params(std::size_t n, const ModelSettings& s, std::uint64_t rff_seed) {
  ModelParams p;
  p.c = s.c;
  p.delta_t = s.delta_t;
  p.gamma_reg = s.gamma_reg;
  p.sigma_obs = s.sigma_obs;
  p.alpha = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), s.alpha_init);
  p.filter_bank = FilterBank::identity(s.lower_taps, s.upper_taps);
  p.rff = RffMap(s.rff_features, s.kernel_bandwidth, rff_seed);
  p.gamma_coeffs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), p.rff.feature_size());
  p.validate();
  return p;
}

ObservationMask ObservationMask::full(std::size_t n) {
  ObservationMask m;
  m.indices.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.indices[i] = static_cast<int>(i);
  return m;
}

void ObservationMask::validate(std::size_t n) const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= n) {
      throw ShapeMismatch("observation index " + std::to_string(indices[i]) + " outside [0, N)");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) throw ShapeMismatch("observation indices must be sorted and unique");
  }
}

Eigen::VectorXd ObservationMask::select(const Eigen::VectorXd& v) const { return v(indices); }

Eigen::MatrixXd ObservationMask::select_rows(const Eigen::MatrixXd& m) const { return m(indices, Eigen::all); }

Eigen::MatrixXd transition(const TopoOperators& ops, double c, double delta_t) {
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  return Eigen::MatrixXd::Identity(n, n) - (c * delta_t) * ops.l_block;
}

Eigen::MatrixXd process_cov(const TopoOperators& ops, const Eigen::VectorXd& alpha, double delta_t,
                            double gamma_reg) {
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  if (alpha.size() != n) throw ShapeMismatch("alpha length must be N");
  const Eigen::MatrixXd scaled = ops.dirac * alpha.asDiagonal();
  Eigen::MatrixXd q = delta_t * scaled * scaled.transpose();
  q.diagonal().array() += gamma_reg;
  return q;
}

namespace {

// Laplacians fed to the filter polynomial of state order k.
Eigen::MatrixXd filter_lower(const TopoOperators& ops, int k) { return k == 0 ? ops.l0 : ops.lower(k); }

Eigen::MatrixXd pre_factor(const TopoOperators& ops, BlockId b) {
  if (b.row == b.col) return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(ops.order_size(b.col)),
                                                       static_cast<Eigen::Index>(ops.order_size(b.col)));
  if (b.col == b.row + 1) return b.col == 1 ? ops.b1 : ops.b2;                                // B_{k+1}
  return b.row == 1 ? Eigen::MatrixXd(ops.b1.transpose()) : Eigen::MatrixXd(ops.b2.transpose());  // B_k^T
}

std::vector<Eigen::MatrixXd> power_terms(const Eigen::MatrixXd& pre, const Eigen::MatrixXd& lap, int count) {
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd term = pre;
  for (int n = 0; n < count; ++n) {
    out.push_back(term);
    term = term * lap;
  }
  return out;
}

}  // namespace

ObservationBasis::ObservationBasis(const TopoOperators& ops, int lower_length, int upper_length)
    : lower_length_(lower_length), upper_length_(upper_length), n_(static_cast<Eigen::Index>(ops.dimension())) {
  for (std::size_t i = 0; i < kNumBanks; ++i) {
    const BlockId b = kBanks[i];
    auto& t = terms_[i];
    t.row_offset = static_cast<Eigen::Index>(ops.offset(b.row));
    t.col_offset = static_cast<Eigen::Index>(ops.offset(b.col));
    t.rows = static_cast<Eigen::Index>(ops.order_size(b.row));
    t.cols = static_cast<Eigen::Index>(ops.order_size(b.col));
    const Eigen::MatrixXd pre = pre_factor(ops, b);
    t.lower = power_terms(pre, filter_lower(ops, b.col), lower_length);
    if (upper_taps_active(b)) t.upper = power_terms(pre, ops.l1_upper, upper_length);
  }
}

Eigen::MatrixXd ObservationBasis::assemble(const FilterBank& bank) const {
  if (bank.lower_length() != lower_length_ || bank.upper_length() != upper_length_) {
    throw ShapeMismatch("filter bank tap lengths differ from the observation basis");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t i = 0; i < kNumBanks; ++i) {
    const auto& t = terms_[i];
    if (t.rows == 0 || t.cols == 0) continue;
    auto blk = m.block(t.row_offset, t.col_offset, t.rows, t.cols);
    for (std::size_t n = 0; n < t.lower.size(); ++n) blk += bank.banks[i].lower(static_cast<Eigen::Index>(n)) * t.lower[n];
    for (std::size_t n = 0; n < t.upper.size(); ++n) blk += bank.banks[i].upper(static_cast<Eigen::Index>(n)) * t.upper[n];
  }
  return m;
}

FilterBank ObservationBasis::project(const Eigen::MatrixXd& g) const {
  FilterBank out = FilterBank::zeros(lower_length_, upper_length_);
  for (std::size_t i = 0; i < kNumBanks; ++i) {
    const auto& t = terms_[i];
    if (t.rows == 0 || t.cols == 0) continue;
    const auto blk = g.block(t.row_offset, t.col_offset, t.rows, t.cols);
    for (std::size_t n = 0; n < t.lower.size(); ++n) out.banks[i].lower(static_cast<Eigen::Index>(n)) = blk.cwiseProduct(t.lower[n]).sum();
    for (std::size_t n = 0; n < t.upper.size(); ++n) out.banks[i].upper(static_cast<Eigen::Index>(n)) = blk.cwiseProduct(t.upper[n]).sum();
  }
  return out;
}

Eigen::MatrixXd observation_operator(const TopoOperators& ops, const FilterBank& bank) {
  return ObservationBasis(ops, bank.lower_length(), bank.upper_length()).assemble(bank);
}

Eigen::VectorXd predict_obs(const ModelParams& model, const ObservationMask& mask, const Eigen::MatrixXd& m_op,
                            const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = x + f_hat(model.rff, model.gamma_coeffs, x);
  return mask.select_rows(m_op) * u;
}

Eigen::MatrixXd jacobian(const ModelParams& model, const ObservationMask& mask, const Eigen::MatrixXd& m_op,
                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = f_hat_derivative(model.rff, model.gamma_coeffs, x);
  return mask.select_rows(m_op) * (Eigen::VectorXd::Ones(x.size()) + g).asDiagonal();
}

}  // namespace tkf
