#include "tkf/harness.hpp"

#include "tkf/errors.hpp"
#include "tkf/synthetic.hpp"

#include <limits>

namespace tkf {

CellComplex load_pool(const RunConfig& cfg) {
  CellComplex cc;
  switch (cfg.complex_source) {
    case ComplexSource::kBuiltin:
      cc = builtin_complex();
      break;
    case ComplexSource::kFile:
      cc = load_complex(cfg.complex_path);
      break;
    case ComplexSource::kEdges: {
      const auto faces = enumerate_candidate_cells(cfg.edges, cfg.max_cycle_len, cfg.pool_cap);
      cc = cfg.edge_nodes > 0 ? build_complex(cfg.edge_nodes, cfg.edges, faces) : build_complex(cfg.edges, faces);
      break;
    }
  }
  cc.set_activation(std::vector<std::uint8_t>(cc.n_faces_pool(), 1));
  return cc;
}

Experiment prepare_experiment(const RunConfig& cfg) {
  const Seeds& seeds = cfg.require_seeds();
  Experiment ex;
  ex.pool = load_pool(cfg);
  if (cfg.stream_source == StreamSource::kSynthetic) {
    SyntheticData data = generate_synthetic(ex.pool, cfg.generator, seeds.topology, seeds.noise);
    ex.truth = data.truth;
    ex.true_taps = data.true_taps;
    ex.stream = std::move(data.stream);
  } else {
    ex.stream.observations = read_stream_csv(cfg.stream_path);
    if (ex.stream.width() != ex.pool.dimension()) {
      throw ShapeMismatch("stream has " + std::to_string(ex.stream.width()) + " signals but the complex has " +
                          std::to_string(ex.pool.dimension()) + " cells");
    }
    if (ex.stream.length() == 0) throw InsufficientStream("stream file has no rows");
  }
  if (!cfg.truth_path.empty()) {
    ex.truth = load_truth(cfg.truth_path);
    if (ex.truth->size() != ex.pool.n_faces_pool()) throw ShapeMismatch("truth length does not match the pool");
  }
  ex.stream = apply_missing(ex.stream, cfg.missing_rate, seeds.mask);
  return ex;
}

std::vector<std::uint8_t> resolve_activation(const RunConfig& cfg, const Experiment& ex) {
  const std::size_t n2 = ex.pool.n_faces_pool();
  switch (cfg.activation) {
    case ActivationMode::kAuto:
      return ex.truth ? *ex.truth : std::vector<std::uint8_t>(n2, 1);
    case ActivationMode::kAll:
      return std::vector<std::uint8_t>(n2, 1);
    case ActivationMode::kNone:
      return std::vector<std::uint8_t>(n2, 0);
    case ActivationMode::kTruth:
      if (!ex.truth) throw MissingGroundTruth("activation 'truth' needs a synthetic stream or truth_path");
      return *ex.truth;
    case ActivationMode::kList: {
      std::vector<std::uint8_t> e(n2, 0);
      for (std::size_t k : cfg.activation_list) {
        if (k >= n2) throw DanglingIndex("activation lists face " + std::to_string(k) + " outside the pool");
        e[k] = 1;
      }
      return e;
    }
  }
  return {};
}

Tkf make_filter(const RunConfig& cfg, CellComplex complex) {
  const std::size_t n = complex.dimension();
  ModelParams params = make_params(n, cfg.model, cfg.require_seeds().rff);
  TkfOptions opts;
  opts.rates = cfg.rates;
  opts.gradient_clip = cfg.gradient_clip;
  opts.joseph = cfg.joseph;
  return Tkf(std::move(complex), std::move(params), FilterState::initial(n, cfg.p0_scale), opts);
}

RunReport run_forecast(const RunConfig& cfg, const Experiment& ex) {
  CellComplex cc = ex.pool;
  cc.set_activation(resolve_activation(cfg, ex));
  Tkf filter = make_filter(cfg, std::move(cc));
  const std::size_t stab = stabilization_step(cfg.p_stab, ex.stream.length());
  return run_tkf(filter, ex.stream.observations, stab);
}

IdentificationReport run_identify(const RunConfig& cfg, const Experiment& ex) {
  Tkf filter = make_filter(cfg, ex.pool);
  IdentifyConfig id;
  id.warmup = warmup_steps(cfg.warmup_fraction, ex.stream.length());
  id.epsilon = cfg.epsilon;
  IdentificationReport report = identify_cells(filter, ex.stream.observations, id);
  if (ex.truth) report.metrics = confusion(report.activation, *ex.truth);
  return report;
}

Eigen::MatrixXd hodge_energies(const SpectralBasis& basis, const TopoOperators& ops, const Eigen::MatrixXd& signals) {
  const auto off = static_cast<Eigen::Index>(ops.n0);
  const auto n1 = static_cast<Eigen::Index>(ops.n1);
  Eigen::MatrixXd out(signals.rows(), 3);
  for (Eigen::Index t = 0; t < signals.rows(); ++t) {
    const Eigen::VectorXd s1 = signals.row(t).segment(off, n1).transpose();
    if (s1.array().isNaN().any()) {
      out.row(t).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const HodgeParts parts = hodge_decompose(basis, s1);
    out(t, 0) = parts.gradient.squaredNorm();
    out(t, 1) = parts.curl.squaredNorm();
    out(t, 2) = parts.harmonic.squaredNorm();
  }
  return out;
}

}  // namespace tkf
