#include "tkf/spectral.hpp"

#include "tkf/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace tkf {

std::size_t TopoOperators::order_size(int order) const {
  switch (order) {
    case 0: return n0;
    case 1: return n1;
    case 2: return n2;
    default: throw ConfigError("cell order must be 0, 1 or 2");
  }
}

std::size_t TopoOperators::offset(int order) const {
  switch (order) {
    case 0: return 0;
    case 1: return n0;
    case 2: return n0 + n1;
    default: throw ConfigError("cell order must be 0, 1 or 2");
  }
}

Eigen::MatrixXd TopoOperators::lower(int order) const {
  switch (order) {
    case 0: return Eigen::MatrixXd::Zero(n0, n0);
    case 1: return l1_lower;
    case 2: return l2;
    default: throw ConfigError("cell order must be 0, 1 or 2");
  }
}

Eigen::MatrixXd TopoOperators::upper(int order) const {
  switch (order) {
    case 0: return l0;
    case 1: return l1_upper;
    case 2: return Eigen::MatrixXd::Zero(n2, n2);
    default: throw ConfigError("cell order must be 0, 1 or 2");
  }
}

TopoOperators build_operators(const CellComplex& cc) {
  TopoOperators ops;
  ops.n0 = cc.n_nodes();
  ops.n1 = cc.n_edges();
  ops.n2 = cc.n_faces_pool();
  ops.b1 = cc.b1();
  ops.b2 = masked_b2(cc);
  ops.l0 = ops.b1 * ops.b1.transpose();
  ops.l1_lower = ops.b1.transpose() * ops.b1;
  ops.l1_upper = ops.b2 * ops.b2.transpose();
  ops.l2 = ops.b2.transpose() * ops.b2;

  const auto n0 = static_cast<Eigen::Index>(ops.n0);
  const auto n1 = static_cast<Eigen::Index>(ops.n1);
  const auto n2 = static_cast<Eigen::Index>(ops.n2);
  const Eigen::Index n = n0 + n1 + n2;

  ops.l_block = Eigen::MatrixXd::Zero(n, n);
  ops.l_block.block(0, 0, n0, n0) = ops.l0;
  ops.l_block.block(n0, n0, n1, n1) = ops.l1_lower + ops.l1_upper;
  ops.l_block.block(n0 + n1, n0 + n1, n2, n2) = ops.l2;

  ops.dirac = Eigen::MatrixXd::Zero(n, n);
  ops.dirac.block(0, n0, n0, n1) = ops.b1;
  ops.dirac.block(n0, 0, n1, n0) = ops.b1.transpose();
  ops.dirac.block(n0, n0 + n1, n1, n2) = ops.b2;
  ops.dirac.block(n0 + n1, n0, n2, n1) = ops.b2.transpose();
  return ops;
}

namespace {

struct Mode {
  double value;
  Band band;
  Eigen::VectorXd vector;
};

double zero_threshold(const Eigen::VectorXd& values) {
  const double top = values.size() ? values.maxCoeff() : 0.0;
  return kZeroEigenTolerance * std::max(top, 1.0);
}

void collect_nonzero(const Eigen::MatrixXd& m, Band band, std::vector<Mode>& modes) {
  if (m.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double tol = zero_threshold(es.eigenvalues());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (es.eigenvalues()(i) > tol) modes.push_back({es.eigenvalues()(i), band, es.eigenvectors().col(i)});
  }
}

OrderSpectrum order_spectrum(const TopoOperators& ops, int order) {
  const auto size = static_cast<Eigen::Index>(ops.order_size(order));
  std::vector<Mode> modes;
  if (size > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(ops.laplacian(order));
    const double tol = zero_threshold(full.eigenvalues());
    for (Eigen::Index i = 0; i < size; ++i) {
      if (full.eigenvalues()(i) <= tol) modes.push_back({0.0, Band::kHarmonic, full.eigenvectors().col(i)});
    }
    collect_nonzero(ops.lower(order), Band::kGradient, modes);
    collect_nonzero(ops.upper(order), Band::kCurl, modes);
  }
  if (static_cast<Eigen::Index>(modes.size()) != size) {
    throw NumericalError("Hodge bands of order " + std::to_string(order) + " do not partition the space");
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const Mode& a, const Mode& b) { return a.value < b.value; });

  OrderSpectrum spec;
  spec.vectors.resize(size, size);
  spec.values.resize(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto& mode = modes[static_cast<std::size_t>(i)];
    spec.vectors.col(i) = mode.vector;
    spec.values(i) = mode.value;
    spec.bands.push_back(mode.band);
    const int idx = static_cast<int>(i);
    switch (mode.band) {
      case Band::kGradient: spec.gradient.push_back(idx); break;
      case Band::kCurl: spec.curl.push_back(idx); break;
      case Band::kHarmonic: spec.harmonic.push_back(idx); break;
    }
  }
  return spec;
}

Eigen::MatrixXd band_columns(const OrderSpectrum& spec, const std::vector<int>& cols) {
  Eigen::MatrixXd out(spec.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = spec.vectors.col(cols[i]);
  return out;
}

}  // namespace

Eigen::MatrixXd SpectralBasis::full_vectors() const {
  Eigen::Index n = 0;
  for (const auto& o : orders) n += o.vectors.rows();
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& o : orders) {
    u.block(at, at, o.vectors.rows(), o.vectors.cols()) = o.vectors;
    at += o.vectors.rows();
  }
  return u;
}

Eigen::VectorXd SpectralBasis::full_values() const {
  Eigen::Index n = 0;
  for (const auto& o : orders) n += o.values.size();
  Eigen::VectorXd v(n);
  Eigen::Index at = 0;
  for (const auto& o : orders) {
    v.segment(at, o.values.size()) = o.values;
    at += o.values.size();
  }
  return v;
}

SpectralBasis spectral_basis(const TopoOperators& ops) {
  SpectralBasis basis;
  for (int k = 0; k < 3; ++k) basis.orders[static_cast<std::size_t>(k)] = order_spectrum(ops, k);
  basis.rank_gradient = static_cast<int>(basis.orders[1].gradient.size());
  basis.rank_curl = static_cast<int>(basis.orders[1].curl.size());
  return basis;
}

HodgeParts hodge_decompose(const SpectralBasis& basis, const Eigen::VectorXd& s1) {
  const auto& edges = basis.orders[1];
  if (s1.size() != edges.vectors.rows()) throw ShapeMismatch("edge signal length does not match N1");
  const Eigen::MatrixXd ug = band_columns(edges, edges.gradient);
  const Eigen::MatrixXd uc = band_columns(edges, edges.curl);
  const Eigen::MatrixXd uh = band_columns(edges, edges.harmonic);
  HodgeParts parts;
  parts.gradient = ug * (ug.transpose() * s1);
  parts.curl = uc * (uc.transpose() * s1);
  parts.harmonic = uh * (uh.transpose() * s1);
  return parts;
}

HodgeParts hodge_decompose(const TopoOperators& ops, const Eigen::VectorXd& s1) {
  return hodge_decompose(spectral_basis(ops), s1);
}

Eigen::VectorXd tft(const SpectralBasis& basis, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(x.size());
  Eigen::Index at = 0;
  for (const auto& o : basis.orders) {
    const Eigen::Index n = o.vectors.rows();
    if (at + n > x.size()) throw ShapeMismatch("signal shorter than N");
    out.segment(at, n) = o.vectors.transpose() * x.segment(at, n);
    at += n;
  }
  if (at != x.size()) throw ShapeMismatch("signal length does not match N");
  return out;
}

Eigen::VectorXd inverse_tft(const SpectralBasis& basis, const Eigen::VectorXd& coefficients) {
  Eigen::VectorXd out(coefficients.size());
  Eigen::Index at = 0;
  for (const auto& o : basis.orders) {
    const Eigen::Index n = o.vectors.rows();
    if (at + n > coefficients.size()) throw ShapeMismatch("coefficient vector shorter than N");
    out.segment(at, n) = o.vectors * coefficients.segment(at, n);
    at += n;
  }
  if (at != coefficients.size()) throw ShapeMismatch("coefficient length does not match N");
  return out;
}

Eigen::MatrixXd spectral_process_cov(const TopoOperators& ops, const SpectralBasis& basis,
                                     const Eigen::VectorXd& alpha, double delta_t) {
  if (alpha.size() != static_cast<Eigen::Index>(ops.dimension())) throw ShapeMismatch("alpha length must be N");
  // (D^T U)^T diag(alpha^2) (D^T U)
  const Eigen::MatrixXd v = ops.dirac.transpose() * basis.full_vectors();
  return delta_t * v.transpose() * alpha.array().square().matrix().asDiagonal() * v;
}

}  // namespace tkf
