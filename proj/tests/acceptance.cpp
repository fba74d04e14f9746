// One line per acceptance criterion. `tkf_acceptance <name>` runs a single
// criterion; without arguments every criterion runs. Exit status is non-zero
// when any selected criterion fails.
#include "support.hpp"

#include "tkf/cellid.hpp"
#include "tkf/config.hpp"
#include "tkf/filter.hpp"
#include "tkf/harness.hpp"
#include "tkf/synthetic.hpp"

#include <fmt/format.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tkf;
using tkf::testing::max_abs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------- algebra

Outcome algebraic_suite() {
  std::mt19937_64 gen(2024);
  double worst_power = 0.0;
  int exact_failures = 0;
  for (int i = 0; i < 100; ++i) {
    const CellComplex cc = tkf::testing::random_complex(gen, 4, 7, 5);
    const TopoOperators ops = build_operators(cc);
    if (max_abs(cc.b1() * masked_b2(cc)) != 0.0) ++exact_failures;
    if (max_abs(ops.dirac * ops.dirac - ops.l_block) != 0.0) ++exact_failures;
    if (max_abs(ops.l1_lower * ops.l1_upper) != 0.0) ++exact_failures;
    Eigen::MatrixXd l1n = Eigen::MatrixXd::Identity(ops.n1, ops.n1), lo = l1n, up = l1n;
    for (int n = 1; n <= 5; ++n) {
      l1n = l1n * ops.laplacian(1);
      lo = lo * ops.l1_lower;
      up = up * ops.l1_upper;
      worst_power = std::max(worst_power, max_abs(l1n - lo - up));
    }
  }
  return {exact_failures == 0 && worst_power <= 1e-8,
          fmt::format("exact identity failures {}, worst power-split error {:.2e}", exact_failures, worst_power)};
}

Outcome hodge_suite() {
  std::mt19937_64 gen(2025);
  double worst_orth = 0.0, worst_recon = 0.0;
  for (int c = 0; c < 10; ++c) {
    const TopoOperators ops = build_operators(tkf::testing::random_complex(gen, 4, 7, 5));
    const SpectralBasis basis = spectral_basis(ops);
    for (int j = 0; j < 10; ++j) {
      const Eigen::VectorXd s = tkf::testing::random_vector(gen, static_cast<Eigen::Index>(ops.n1));
      const HodgeParts h = hodge_decompose(basis, s);
      const double scale = s.squaredNorm();
      worst_orth = std::max({worst_orth, std::abs(h.gradient.dot(h.curl)) / scale,
                             std::abs(h.gradient.dot(h.harmonic)) / scale, std::abs(h.curl.dot(h.harmonic)) / scale});
      worst_recon = std::max(worst_recon, (h.gradient + h.curl + h.harmonic - s).cwiseAbs().maxCoeff());
    }
  }
  return {worst_orth <= 1e-10 && worst_recon <= 1e-10,
          fmt::format("worst relative inner product {:.2e}, worst reconstruction {:.2e}", worst_orth, worst_recon)};
}

Outcome spectral_q_check() {
  std::mt19937_64 gen(2026);
  double worst = 0.0;
  std::vector<CellComplex> complexes = {builtin_complex()};
  for (int i = 0; i < 20; ++i) complexes.push_back(tkf::testing::random_complex(gen, 4, 7, 5));
  for (const CellComplex& cc : complexes) {
    const TopoOperators ops = build_operators(cc);
    const SpectralBasis basis = spectral_basis(ops);
    for (double c : {0.5, 1.0, 2.3}) {
      const auto n = static_cast<Eigen::Index>(ops.dimension());
      const Eigen::MatrixXd q = spectral_process_cov(ops, basis, Eigen::VectorXd::Constant(n, c), 0.1);
      worst = std::max(worst, (q.diagonal() - 0.1 * c * c * basis.full_values()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-8, fmt::format("worst diagonal deviation {:.2e}", worst)};
}

Outcome kalman_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 gen(seed);
    const CellComplex cc = tkf::testing::random_complex(gen, 4, 7, 5);
    const TopoOperators ops = build_operators(cc);
    const auto n = static_cast<Eigen::Index>(ops.dimension());
    ModelParams p = make_params(static_cast<std::size_t>(n), ModelSettings{}, seed);
    p.alpha = tkf::testing::random_vector(gen, n);
    TkfOptions opts;
    opts.learn = false;
    Tkf filter(cc, p, FilterState::initial(static_cast<std::size_t>(n)), opts);
    tkf::testing::TextbookKalman kf;
    kf.f = Eigen::MatrixXd::Identity(n, n) - p.c * p.delta_t * ops.l_block;
    kf.q = p.delta_t * ops.dirac * p.alpha.array().square().matrix().asDiagonal() * ops.dirac +
           p.gamma_reg * Eigen::MatrixXd::Identity(n, n);
    kf.r = p.sigma_obs * p.sigma_obs;
    kf.x = Eigen::VectorXd::Zero(n);
    kf.p = Eigen::MatrixXd::Identity(n, n);
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd y = tkf::testing::random_vector(gen, n, 3.0);
      filter.step(y);
      kf.step(y);
      worst = std::max({worst, (filter.state().x_post - kf.x).cwiseAbs().maxCoeff(),
                        max_abs(filter.state().p_post - kf.p)});
    }
  }
  return {worst <= 1e-10, fmt::format("worst state/covariance deviation {:.2e} over 5 seeds x 200 steps", worst)};
}

// ---------------------------------------------------------------- gradients

struct GradInstance {
  TopoOperators ops;
  ModelParams params;
  FilterState previous;
  ObservationMask mask;
  Eigen::VectorXd y;
};

GradInstance gradient_instance(std::mt19937_64& gen, std::uint64_t seed) {
  GradInstance in;
  in.ops = build_operators(tkf::testing::random_complex(gen, 3, 6, 4));
  const auto n = static_cast<Eigen::Index>(in.ops.dimension());
  ModelSettings s;
  s.sigma_obs = 0.8;
  in.params = make_params(static_cast<std::size_t>(n), s, seed);
  in.params.alpha = tkf::testing::random_vector(gen, n);
  in.params.filter_bank = tkf::testing::random_bank(gen, 3, 3, 0.3);
  in.params.gamma_coeffs = tkf::testing::random_matrix(gen, n, in.params.rff.feature_size(), 0.5);
  in.previous = {tkf::testing::random_vector(gen, n), tkf::testing::random_spd(gen, n), 0};
  std::bernoulli_distribution keep(0.75);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (keep(gen) || i == 0) in.mask.indices.push_back(static_cast<int>(i));
  }
  in.y = tkf::testing::random_vector(gen, static_cast<Eigen::Index>(in.mask.size()), 2.0);
  return in;
}

double oracle(const GradInstance& in, const ModelParams& p) {
  return tkf::testing::reference_loss(p, in.ops, in.previous.x_post, in.previous.p_post, in.mask.indices, in.y);
}

Outcome gradient_suite() {
  std::mt19937_64 gen(2027);
  const double h = 1e-6;
  double worst[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 20; ++i) {
    const GradInstance in = gradient_instance(gen, static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd q = process_cov(in.ops, in.params.alpha, in.params.delta_t, in.params.gamma_reg);
    const Prior prior = predict(in.previous, transition(in.ops, in.params.c, in.params.delta_t), q);
    const ObservationBasis basis(in.ops, 3, 3);
    const Eigen::MatrixXd m = basis.assemble(in.params.filter_bank);
    const Correction c = correct(prior, in.y, in.params, in.mask, m);
    const LossGradient g = loss_gradient(in.params, in.ops, basis, m, prior, c.record);

    auto fd = [&](auto perturb, Eigen::Index count) {
      Eigen::VectorXd out(count);
      for (Eigen::Index k = 0; k < count; ++k) {
        ModelParams a = in.params, b = in.params;
        perturb(a, k, h);
        perturb(b, k, -h);
        out(k) = (oracle(in, a) - oracle(in, b)) / (2 * h);
      }
      return out;
    };
    const Eigen::VectorXd fa = fd([](ModelParams& p, Eigen::Index k, double d) { p.alpha(k) += d; }, g.alpha.size());
    const Eigen::VectorXd ft = fd(
        [](ModelParams& p, Eigen::Index k, double d) {
          Eigen::VectorXd t = p.filter_bank.flatten();
          t(k) += d;
          p.filter_bank.assign(t);
        },
        in.params.filter_bank.parameter_count());
    const Eigen::VectorXd fg =
        fd([](ModelParams& p, Eigen::Index k, double d) { p.gamma_coeffs(k) += d; }, g.gamma.size());
    auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-8); };
    worst[0] = std::max(worst[0], rel(g.alpha, fa));
    worst[1] = std::max(worst[1], rel(g.taps.flatten(), ft));
    worst[2] = std::max(worst[2], rel(g.gamma.reshaped(), fg));
  }
  return {worst[0] <= 1e-4 && worst[1] <= 1e-4 && worst[2] <= 1e-4,
          fmt::format("worst relative error: uncertainty {:.2e}, taps {:.2e}, RFF coefficients {:.2e}", worst[0],
                      worst[1], worst[2])};
}

// ---------------------------------------------------------------- synthetic runs

RunConfig synthetic_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.seeds = Seeds::from_base(seed);
  return cfg;
}

// Forecast that knows the latent state, the true operator and the noise
// law: 10 M E[cos(x_t) | x_{t-1}]. Lower bound on what any learner reaches.
double oracle_floor(std::uint64_t seed) {
  const RunConfig cfg = synthetic_config(seed);
  const Experiment ex = prepare_experiment(cfg);
  CellComplex cc = ex.pool;
  cc.set_activation(*ex.truth);
  const TopoOperators ops = build_operators(cc);
  const auto n = static_cast<Eigen::Index>(ops.dimension());
  const Eigen::MatrixXd m = observation_operator(ops, *ex.true_taps);
  const Eigen::MatrixXd lt = transition(ops, cfg.generator.c, cfg.generator.delta_t);
  const Eigen::VectorXd damp =
      (-0.5 * process_cov(ops, Eigen::VectorXd::Constant(n, cfg.generator.sigma_p), cfg.generator.delta_t, 0.0)
                  .diagonal()
                  .array())
          .exp();
  const Eigen::MatrixXd& latent = *ex.stream.latent;
  Eigen::MatrixXd forecast(latent.rows(), n);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < latent.rows(); ++t) {
    forecast.row(t) = (cfg.generator.amplitude * m * ((lt * prev).array().cos() * damp.array()).matrix()).transpose();
    prev = latent.row(t).transpose();
  }
  return nmse(ex.stream.observations, forecast, stabilization_step(cfg.p_stab, ex.stream.length()));
}

Outcome forecasting_regression() {
  double sum = 0.0, floor_sum = 0.0;
  std::string per;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const RunConfig cfg = synthetic_config(s);
    const double v = run_forecast(cfg, prepare_experiment(cfg)).final_nmse;
    sum += v;
    floor_sum += oracle_floor(s);
    per += fmt::format("{}{:.3f}", s == 1 ? "" : " ", v);
  }
  const double mean = sum / 5;
  return {mean <= 0.05, fmt::format("mean final NMSE {:.4f} (seeds: {}); bound 0.05; oracle forecaster with true "
                                    "state and operator reaches {:.4f}",
                                    mean, per, floor_sum / 5)};
}

Outcome missing_ordering() {
  const double rates[4] = {0.0, 0.1, 0.2, 0.3};
  double mean[4] = {0, 0, 0, 0};
  for (int r = 0; r < 4; ++r) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      RunConfig cfg = synthetic_config(s);
      cfg.missing_rate = rates[r];
      mean[r] += run_forecast(cfg, prepare_experiment(cfg)).final_nmse / 5;
    }
  }
  const bool ok = mean[0] <= mean[1] && mean[1] <= mean[2] && mean[2] <= mean[3];
  return {ok, fmt::format("mean NMSE at 0/10/20/30% missing: {:.4f} {:.4f} {:.4f} {:.4f}", mean[0], mean[1], mean[2],
                          mean[3])};
}

Outcome higher_order_value() {
  double full = 0.0, empty = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    RunConfig cfg = synthetic_config(s);
    const Experiment ex = prepare_experiment(cfg);
    cfg.activation = ActivationMode::kTruth;
    full += run_forecast(cfg, ex).final_nmse / 10;
    cfg.activation = ActivationMode::kNone;
    empty += run_forecast(cfg, ex).final_nmse / 10;
  }
  return {full <= empty, fmt::format("mean NMSE full {:.4f}, empty {:.4f} over 10 seeds", full, empty)};
}

Outcome identification_suite() {
  // (a) rollback exactness
  bool rollback = true;
  {
    RunConfig cfg = synthetic_config(1);
    cfg.epsilon = -1.0;
    const Experiment ex = prepare_experiment(cfg);
    Tkf identified = make_filter(cfg, ex.pool);
    const IdentificationReport r =
        identify_cells(identified, ex.stream.observations, {warmup_steps(cfg.warmup_fraction, ex.stream.length()), -1.0});
    CellComplex empty = ex.pool;
    empty.set_activation(std::vector<std::uint8_t>(empty.n_faces_pool(), 0));
    Tkf plain = make_filter(cfg, empty);
    const RunReport pr = run_tkf(plain, ex.stream.observations, 0);
    rollback = identified.state().x_post == plain.state().x_post && identified.state().p_post == plain.state().p_post &&
               identified.params().alpha == plain.params().alpha &&
               identified.params().filter_bank.flatten() == plain.params().filter_bank.flatten() &&
               identified.params().gamma_coeffs == plain.params().gamma_coeffs && r.forecasts == pr.forecasts;
  }

  // (b) F1 at cell ratio 1.0, epsilon 0
  double f1 = 0.0, accuracy = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const RunConfig cfg = synthetic_config(s);
    const IdentificationReport r = run_identify(cfg, prepare_experiment(cfg));
    f1 += r.metrics->f1() / 10;
    accuracy += r.metrics->accuracy() / 10;
  }

  // (c) accepted sets shrink as epsilon decreases on a fixed stream
  bool monotone = true;
  std::string sets;
  {
    RunConfig cfg = synthetic_config(1);
    const Experiment ex = prepare_experiment(cfg);
    std::vector<std::uint8_t> previous;
    for (double eps : {0.0, -0.02, -0.05, -0.1}) {
      cfg.epsilon = eps;
      const IdentificationReport r = run_identify(cfg, ex);
      if (!previous.empty()) {
        for (std::size_t k = 0; k < r.activation.size(); ++k) monotone = monotone && r.activation[k] <= previous[k];
      }
      previous = r.activation;
      std::string s;
      for (auto e : r.activation) s += e ? '1' : '0';
      sets += fmt::format(" eps={}:{}", eps, s);
    }
  }
  return {rollback && f1 >= 0.7 && monotone,
          fmt::format("(a) rollback exact: {}; (b) mean F1 {:.3f}, accuracy {:.3f} over 10 seeds (bound 0.7); "
                      "(c) nested accepted sets: {} [{} ]",
                      rollback ? "yes" : "no", f1, accuracy, monotone ? "yes" : "no", sets)};
}

// ---------------------------------------------------------------- determinism

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TKF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "tkf_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "c.json");
    cfg << R"({"stream": {"length": 300}, "missing_rate": 0.1})";
  }
  const std::string config = (dir / "c.json").string();
  int compared = 0, differing = 0, failures = 0;
  for (const char* cmd : {"generate", "forecast", "identify", "decompose"}) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = dir / cmd / run;
      if (run_cli(fmt::format("{} --config {} --seed 11 --out {}", cmd, config, out.string())) != 0) ++failures;
    }
    for (const auto& entry : fs::directory_iterator(dir / cmd / "a")) {
      ++compared;
      if (slurp(entry.path()) != slurp(dir / cmd / "b" / entry.path().filename())) ++differing;
    }
  }
  fs::remove_all(dir);
  return {failures == 0 && differing == 0 && compared > 0,
          fmt::format("{} files compared across 4 subcommands, {} differ, {} failed runs", compared, differing, failures)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"algebraic_suite", 10, algebraic_suite},
      {"hodge_suite", 5, hodge_suite},
      {"spectral_q_check", 5, spectral_q_check},
      {"kalman_oracle", 10, kalman_oracle},
      {"gradient_suite", 30, gradient_suite},
      {"forecasting_regression", 300, forecasting_regression},
      {"missing_data_ordering", 1200, missing_ordering},
      {"higher_order_value", 600, higher_order_value},
      {"identification_suite", 1800, identification_suite},
      {"determinism", 600, determinism},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.name)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs <= c.budget_seconds;
    if (!pass) ++failed;
    fmt::print("[{}] {} ({:.2f}s / {:.0f}s budget): {}\n", pass ? "PASS" : "FAIL", c.name, secs, c.budget_seconds,
               o.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
