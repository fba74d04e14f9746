#pragma once

#include "tkf/cellid.hpp"
#include "tkf/config.hpp"
#include "tkf/filter.hpp"
#include "tkf/spectral.hpp"
#include "tkf/stream.hpp"

#include <optional>
#include <vector>

namespace tkf {

// Complex pool, stream (missing entries already applied) and, when known,
// the ground truth.
struct Experiment {
  CellComplex pool;  // every candidate face active
  ObservationStream stream;
  std::optional<std::vector<std::uint8_t>> truth;
  std::optional<FilterBank> true_taps;
};

CellComplex load_pool(const RunConfig& config);
Experiment prepare_experiment(const RunConfig& config);

// Activation the forecasting model runs with.
std::vector<std::uint8_t> resolve_activation(const RunConfig& config, const Experiment& experiment);

// Fresh filter on `complex` with the configured model settings.
Tkf make_filter(const RunConfig& config, CellComplex complex);

RunReport run_forecast(const RunConfig& config, const Experiment& experiment);

IdentificationReport run_identify(const RunConfig& config, const Experiment& experiment);

// Per-step energy of the gradient, curl and harmonic parts of the edge
// block. Rows with a missing edge entry are NaN.
Eigen::MatrixXd hodge_energies(const SpectralBasis& basis, const TopoOperators& ops, const Eigen::MatrixXd& signals);

}  // namespace tkf
