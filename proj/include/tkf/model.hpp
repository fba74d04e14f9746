#pragma once

#include "tkf/rff.hpp"
#include "tkf/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace tkf {

// Block (row, col) of the observation operator maps state order `col` to
// observation order `row`.
struct BlockId {
  int row = 0;
  int col = 0;
};

inline constexpr std::size_t kNumBanks = 7;
inline constexpr std::array<BlockId, kNumBanks> kBanks = {
    {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}}};

// Upper taps only act on edge Laplacians; at orders 0 and 2 the polynomial
// runs over the single Laplacian with the lower taps.
constexpr bool upper_taps_active(BlockId b) { return b.col == 1; }

struct TapBank {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct FilterBank {
  std::array<TapBank, kNumBanks> banks;

  int lower_length() const { return static_cast<int>(banks[0].lower.size()); }
  int upper_length() const { return static_cast<int>(banks[0].upper.size()); }
  int parameter_count() const { return static_cast<int>(kNumBanks) * (lower_length() + upper_length()); }

  // h_{0,lower} = 1 on the diagonal blocks, every other tap zero.
  static FilterBank identity(int lower_length, int upper_length);
  static FilterBank zeros(int lower_length, int upper_length);

  // Bank-major, lower taps then upper taps.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
};

struct ModelParams {
  double c = 0.5;
  double delta_t = 0.1;
  double gamma_reg = 1e-3;
  double sigma_obs = 1.0;
  Eigen::VectorXd alpha;
  FilterBank filter_bank;
  RffMap rff;
  Eigen::MatrixXd gamma_coeffs;  // N x 2M

  std::size_t dimension() const { return static_cast<std::size_t>(alpha.size()); }
  // Throws ConfigError on invalid scalars or inconsistent shapes.
  void validate() const;
};

struct ModelSettings {
  double c = 0.5;
  double delta_t = 0.1;
  double gamma_reg = 1e-3;
  double sigma_obs = 1.0;
  double alpha_init = 1.0;
  int rff_features = 2;
  double kernel_bandwidth = 5.0;
  int lower_taps = 3;
  int upper_taps = 3;
};

// Identity observation filter, zero RFF coefficients and uniform alpha.
ModelParams make_params(std::size_t n, const ModelSettings& settings, std::uint64_t rff_seed);

// Row selection Phi. Indices are sorted, unique and inside [0, N).
struct ObservationMask {
  std::vector<int> indices;

  static ObservationMask full(std::size_t n);
  std::size_t size() const { return indices.size(); }
  void validate(std::size_t n) const;

  Eigen::VectorXd select(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m) const;
};

// I - c dt L
Eigen::MatrixXd transition(const TopoOperators& ops, double c, double delta_t);

// dt D diag(alpha)^2 D^T + gamma I
Eigen::MatrixXd process_cov(const TopoOperators& ops, const Eigen::VectorXd& alpha, double delta_t,
                            double gamma_reg);

Eigen::MatrixXd observation_operator(const TopoOperators& ops, const FilterBank& bank);

// Every filter tap contributes tap * E_t to the observation operator, with
// E_t a fixed matrix supported on one block. Caching the E_t makes both the
// operator assembly and the tap gradient cheap.
class ObservationBasis {
 public:
  ObservationBasis() = default;
  ObservationBasis(const TopoOperators& ops, int lower_length, int upper_length);

  Eigen::MatrixXd assemble(const FilterBank& bank) const;
  // d<G, M(h)>/dh for every tap, in FilterBank layout.
  FilterBank project(const Eigen::MatrixXd& g) const;

 private:
  struct BankTerms {
    Eigen::Index row_offset = 0, col_offset = 0, rows = 0, cols = 0;
    std::vector<Eigen::MatrixXd> lower;
    std::vector<Eigen::MatrixXd> upper;  // empty when the upper taps are inert
  };
  int lower_length_ = 0;
  int upper_length_ = 0;
  Eigen::Index n_ = 0;
  std::array<BankTerms, kNumBanks> terms_;
};

// y_hat = Phi M (x + f_hat(x))
Eigen::VectorXd predict_obs(const ModelParams& model, const ObservationMask& mask, const Eigen::MatrixXd& m_op,
                            const Eigen::VectorXd& x);

// J = Phi M (I + diag(f_hat'(x)))
Eigen::MatrixXd jacobian(const ModelParams& model, const ObservationMask& mask, const Eigen::MatrixXd& m_op,
                         const Eigen::VectorXd& x);

}  // namespace tkf
