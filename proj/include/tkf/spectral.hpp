#pragma once

#include "tkf/topology.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace tkf {

// Algebra derived from a complex under its current activation.
struct TopoOperators {
  std::size_t n0 = 0, n1 = 0, n2 = 0;
  Eigen::MatrixXd b1;  // N0 x N1
  Eigen::MatrixXd b2;  // N1 x N2, masked
  Eigen::MatrixXd l0;
  Eigen::MatrixXd l1_lower;
  Eigen::MatrixXd l1_upper;
  Eigen::MatrixXd l2;
  Eigen::MatrixXd l_block;  // blkdiag(L0, L1, L2)
  Eigen::MatrixXd dirac;    // symmetric, dirac^2 == l_block

  std::size_t dimension() const { return n0 + n1 + n2; }
  std::size_t order_size(int order) const;
  // First index of `order` inside a concatenated signal.
  std::size_t offset(int order) const;

  // Lower and upper parts of L_k. The missing part at the boundary orders
  // (lower for k = 0, upper for k = 2) is a zero matrix.
  Eigen::MatrixXd lower(int order) const;
  Eigen::MatrixXd upper(int order) const;
  Eigen::MatrixXd laplacian(int order) const { return lower(order) + upper(order); }
};

TopoOperators build_operators(const CellComplex& cc);

enum class Band { kGradient, kCurl, kHarmonic };

// Eigenbasis of one Hodge Laplacian, split into Hodge bands.
struct OrderSpectrum {
  Eigen::MatrixXd vectors;    // columns ordered by ascending eigenvalue
  Eigen::VectorXd values;
  std::vector<Band> bands;    // band of each column
  std::vector<int> gradient;  // column indices per band
  std::vector<int> curl;
  std::vector<int> harmonic;
};

struct SpectralBasis {
  std::array<OrderSpectrum, 3> orders;
  int rank_gradient = 0;  // rank(B1)
  int rank_curl = 0;      // rank(B2)

  // blkdiag(U0, U1, U2) and the matching eigenvalue vector.
  Eigen::MatrixXd full_vectors() const;
  Eigen::VectorXd full_values() const;
};

// Eigenvalues below 1e-8 * max(largest eigenvalue, 1) count as zero.
inline constexpr double kZeroEigenTolerance = 1e-8;

// Dense symmetric eigendecompositions per order. Gradient and curl vectors
// come from the nonzero spectra of the lower and upper Laplacians, which
// are also eigenvectors of L_k because L_{k,lower} L_{k,upper} = 0; the
// harmonic vectors span ker(L_k).
SpectralBasis spectral_basis(const TopoOperators& ops);

struct HodgeParts {
  Eigen::VectorXd gradient;
  Eigen::VectorXd curl;
  Eigen::VectorXd harmonic;
};

HodgeParts hodge_decompose(const SpectralBasis& basis, const Eigen::VectorXd& s1);
HodgeParts hodge_decompose(const TopoOperators& ops, const Eigen::VectorXd& s1);

// Blockwise U_k^T x for a concatenated signal of length N, and its inverse.
Eigen::VectorXd tft(const SpectralBasis& basis, const Eigen::VectorXd& x);
Eigen::VectorXd inverse_tft(const SpectralBasis& basis, const Eigen::VectorXd& coefficients);

// U^T Q(alpha) U with the regulariser omitted.
Eigen::MatrixXd spectral_process_cov(const TopoOperators& ops, const SpectralBasis& basis,
                                     const Eigen::VectorXd& alpha, double delta_t);

}  // namespace tkf
