#include "tkf/config.hpp"
#include "tkf/errors.hpp"
#include "tkf/harness.hpp"
#include "tkf/checkpoint.hpp"
#include "tkf/report_io.hpp"
#include "tkf/stream.hpp"
#include "tkf/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> missing;
  std::optional<double> epsilon;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "base seed; overrides the seeds block");
  cmd->add_option("--missing", c.missing, "fraction of entries removed at random, in [0, 1)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--epsilon", c.epsilon, "identification tolerance");
}

tkf::RunConfig resolve(const Common& c) {
  tkf::RunConfig cfg = c.config.empty() ? tkf::RunConfig{} : tkf::load_config(c.config);
  if (c.seed) cfg.seeds = tkf::Seeds::from_base(*c.seed);
  if (c.missing) cfg.missing_rate = *c.missing;
  if (c.epsilon) cfg.epsilon = *c.epsilon;
  cfg.validate();
  cfg.require_seeds();
  fs::create_directories(c.out);
  return cfg;
}

void cmd_generate(const Common& c) {
  const tkf::RunConfig cfg = resolve(c);
  if (cfg.stream_source != tkf::StreamSource::kSynthetic) throw tkf::ConfigError("generate needs a synthetic stream");
  const tkf::Experiment ex = tkf::prepare_experiment(cfg);
  const fs::path out(c.out);
  tkf::CellComplex cc = ex.pool;
  cc.set_activation(*ex.truth);
  tkf::save_complex(cc, out / "complex.json");
  tkf::write_stream_csv(ex.stream.observations, out / "stream.csv");
  tkf::write_stream_csv(*ex.stream.latent, out / "latent.csv");
  tkf::save_truth(*ex.truth, out / "truth.json");
}

void cmd_forecast(const Common& c) {
  const tkf::RunConfig cfg = resolve(c);
  const tkf::Experiment ex = tkf::prepare_experiment(cfg);
  tkf::CellComplex cc = ex.pool;
  cc.set_activation(tkf::resolve_activation(cfg, ex));
  tkf::Tkf filter = tkf::make_filter(cfg, std::move(cc));
  const tkf::RunReport report =
      tkf::run_tkf(filter, ex.stream.observations, tkf::stabilization_step(cfg.p_stab, ex.stream.length()));
  const fs::path out(c.out);
  tkf::write_run_summary(report, out / "report.json");
  tkf::write_steps_csv(report, out / "steps.csv");
  tkf::write_stream_csv(report.forecasts, out / "forecasts.csv");
  tkf::save_checkpoint(tkf::capture_checkpoint(filter), out / "checkpoint.json");
  std::cout << "final NMSE " << report.final_nmse << '\n';
}

void cmd_identify(const Common& c) {
  const tkf::RunConfig cfg = resolve(c);
  const tkf::Experiment ex = tkf::prepare_experiment(cfg);
  const tkf::IdentificationReport report = tkf::run_identify(cfg, ex);
  const fs::path out(c.out);
  tkf::write_identification(report, out / "identification.json");
  tkf::CellComplex cc = ex.pool;
  cc.set_activation(report.activation);
  tkf::save_complex(cc, out / "complex.json");
  tkf::write_stream_csv(report.forecasts, out / "forecasts.csv");
  std::size_t accepted = 0;
  for (auto e : report.activation) accepted += e;
  std::cout << "accepted " << accepted << " of " << report.activation.size() << " candidate cells";
  if (report.metrics) std::cout << ", F1 " << report.metrics->f1();
  std::cout << '\n';
}

void cmd_decompose(const Common& c) {
  const tkf::RunConfig cfg = resolve(c);
  const tkf::Experiment ex = tkf::prepare_experiment(cfg);
  tkf::CellComplex cc = ex.pool;
  cc.set_activation(tkf::resolve_activation(cfg, ex));
  const tkf::TopoOperators ops = tkf::build_operators(cc);
  const tkf::SpectralBasis basis = tkf::spectral_basis(ops);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(ops.dimension()), cfg.model.alpha_init);
  const fs::path out(c.out);
  tkf::write_spectrum(basis, tkf::spectral_process_cov(ops, basis, alpha, cfg.model.delta_t), out / "spectrum.json");
  tkf::write_hodge_csv(tkf::hodge_energies(basis, ops, ex.stream.observations), out / "hodge.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological Kalman filtering on cell complexes"};
  app.require_subcommand(1);
  Common common;
  struct Sub {
    const char* name;
    const char* help;
    void (*run)(const Common&);
  };
  const Sub subs[] = {
      {"generate", "write a synthetic dataset and its complex", cmd_generate},
      {"forecast", "run the filter and write a run report", cmd_forecast},
      {"identify", "run online 2-cell identification", cmd_identify},
      {"decompose", "write Hodge and spectral diagnostics", cmd_decompose},
  };
  for (const Sub& s : subs) add_common(app.add_subcommand(s.name, s.help), common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << tkf::config_schema();
    return 1;
  }

  try {
    for (const Sub& s : subs) {
      if (app.got_subcommand(s.name)) s.run(common);
    }
  } catch (const tkf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const tkf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
