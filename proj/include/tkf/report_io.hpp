#pragma once

#include "tkf/cellid.hpp"
#include "tkf/filter.hpp"
#include "tkf/spectral.hpp"

#include <filesystem>

namespace tkf {

// Summary JSON: final NMSE, stabilisation step, step count, skipped updates.
void write_run_summary(const RunReport& report, const std::filesystem::path& path);
// step,loss,nmse,innovation_norm,observed
void write_steps_csv(const RunReport& report, const std::filesystem::path& path);

void write_identification(const IdentificationReport& report, const std::filesystem::path& path);

// Eigenvalues and Hodge bands per order, Betti numbers and the diagonal of
// the spectral process covariance for `alpha`.
void write_spectrum(const SpectralBasis& basis, const Eigen::MatrixXd& spectral_q, const std::filesystem::path& path);
// t,gradient,curl,harmonic
void write_hodge_csv(const Eigen::MatrixXd& energies, const std::filesystem::path& path);

}  // namespace tkf
