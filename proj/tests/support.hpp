#pragma once

#include "tkf/filter.hpp"
#include "tkf/model.hpp"
#include "tkf/spectral.hpp"
#include "tkf/topology.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace tkf::testing {

// 3 nodes, edges 0->1, 1->2, 0->2, one face walking e0, e1, -e2.
inline CellComplex triangle() {
  return build_complex(3, {{0, 1}, {1, 2}, {0, 2}}, {{{0, 1}, {1, 1}, {2, -1}}});
}

// Random graph on `nodes` nodes with random edge orientations, candidate
// pool from cycle enumeration and a random activation.
inline CellComplex random_complex(std::mt19937_64& gen, int min_nodes = 4, int max_nodes = 7,
                                  std::size_t max_cycle_len = 5) {
  std::uniform_int_distribution<int> size(min_nodes, max_nodes);
  std::bernoulli_distribution coin(0.5);
  const int n = size(gen);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (v == u + 1 || coin(gen)) edges.push_back(coin(gen) ? Edge{u, v} : Edge{v, u});
    }
  }
  CellComplex cc = build_complex(static_cast<std::size_t>(n), edges, enumerate_candidate_cells(edges, max_cycle_len));
  std::vector<std::uint8_t> e(cc.n_faces_pool());
  for (auto& x : e) x = coin(gen) ? 1 : 0;
  cc.set_activation(e);
  return cc;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(gen);
  return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = normal(gen);
  return m;
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, Eigen::Index n) {
  const Eigen::MatrixXd a = random_matrix(gen, n, n);
  return a * a.transpose() / static_cast<double>(n) + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Eigen::MatrixXd mpow(const Eigen::MatrixXd& a, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) out = out * a;
  return out;
}

// Direct block-by-block construction of the observation operator.
inline Eigen::MatrixXd reference_operator(const TopoOperators& ops, const FilterBank& bank) {
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd lower[3] = {ops.l0, ops.l1_lower, ops.l2};
  for (std::size_t i = 0; i < kNumBanks; ++i) {
    const BlockId b = kBanks[i];
    const auto rows = static_cast<Eigen::Index>(ops.order_size(b.row));
    const auto cols = static_cast<Eigen::Index>(ops.order_size(b.col));
    if (rows == 0 || cols == 0) continue;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cols, cols);
    for (Eigen::Index k = 0; k < bank.banks[i].lower.size(); ++k) {
      h += bank.banks[i].lower(k) * mpow(lower[b.col], static_cast<int>(k));
    }
    if (b.col == 1) {
      for (Eigen::Index k = 0; k < bank.banks[i].upper.size(); ++k) {
        h += bank.banks[i].upper(k) * mpow(ops.l1_upper, static_cast<int>(k));
      }
    }
    Eigen::MatrixXd pre;
    if (b.row == b.col) pre = Eigen::MatrixXd::Identity(rows, rows);
    else if (b.row + 1 == b.col) pre = b.col == 1 ? ops.b1 : ops.b2;
    else pre = b.row == 1 ? ops.b1.transpose() : ops.b2.transpose();
    m.block(static_cast<Eigen::Index>(ops.offset(b.row)), static_cast<Eigen::Index>(ops.offset(b.col)), rows, cols) =
        pre * h;
  }
  return m;
}

inline FilterBank random_bank(std::mt19937_64& gen, int lo, int up, double scale = 0.5) {
  FilterBank f = FilterBank::zeros(lo, up);
  f.assign(random_vector(gen, f.parameter_count(), scale));
  return f;
}

// Independent forward evaluation of the one-step negative log-likelihood
// from the previous posterior.
inline double reference_loss(const ModelParams& p, const TopoOperators& ops, const Eigen::VectorXd& x_prev,
                             const Eigen::MatrixXd& p_prev, const std::vector<int>& observed, const Eigen::VectorXd& y) {
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd lt = eye - p.c * p.delta_t * ops.l_block;
  const Eigen::MatrixXd q = p.delta_t * ops.dirac * p.alpha.array().square().matrix().asDiagonal() * ops.dirac.transpose() +
                            p.gamma_reg * eye;
  const Eigen::VectorXd xp = lt * x_prev;
  const Eigen::MatrixXd pp = lt * p_prev * lt.transpose() + q;
  const Eigen::VectorXd& v = p.rff.frequencies();
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  Eigen::VectorXd f(n), g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double fi = 0.0, gi = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      fi += scale * (p.gamma_coeffs(i, k) * std::sin(v(k) * xp(i)) + p.gamma_coeffs(i, v.size() + k) * std::cos(v(k) * xp(i)));
      gi += scale * v(k) * (p.gamma_coeffs(i, k) * std::cos(v(k) * xp(i)) - p.gamma_coeffs(i, v.size() + k) * std::sin(v(k) * xp(i)));
    }
    f(i) = fi;
    g(i) = gi;
  }
  const Eigen::MatrixXd m = reference_operator(ops, p.filter_bank);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(observed.size()), n);
  for (std::size_t r = 0; r < observed.size(); ++r) phi(static_cast<Eigen::Index>(r), observed[r]) = 1.0;
  const Eigen::VectorXd mu = phi * m * (xp + f);
  const Eigen::MatrixXd j = phi * m * (eye + Eigen::MatrixXd(g.asDiagonal()));
  const Eigen::MatrixXd s = j * pp * j.transpose() +
                            p.sigma_obs * p.sigma_obs * Eigen::MatrixXd::Identity(phi.rows(), phi.rows());
  const Eigen::VectorXd r = y - mu;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(s);
  return 0.5 * std::log(s.determinant()) + 0.5 * r.dot(lu.solve(r));
}

// Plain linear Kalman filter: x' = F x, P' = F P F^T + Q, observation y = x + n.
struct TextbookKalman {
  Eigen::MatrixXd f, q;
  double r = 1.0;
  Eigen::VectorXd x;
  Eigen::MatrixXd p;

  void step(const Eigen::VectorXd& y) {
    const auto n = x.size();
    const Eigen::VectorXd xp = f * x;
    const Eigen::MatrixXd pp = f * p * f.transpose() + q;
    const Eigen::MatrixXd s = pp + r * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd k = pp * s.inverse();
    x = xp + k * (y - xp);
    p = (Eigen::MatrixXd::Identity(n, n) - k) * pp;
  }
};

}  // namespace tkf::testing
