#include "tkf/report_io.hpp"

#include "tkf/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>

namespace tkf {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string num(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{:.17g}", v); }

// JSON has no NaN; those become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* band_name(Band b) {
  switch (b) {
    case Band::kGradient: return "gradient";
    case Band::kCurl: return "curl";
    case Band::kHarmonic: return "harmonic";
  }
  return "";
}

}  // namespace

void write_run_summary(const RunReport& r, const std::filesystem::path& path) {
  const json doc = {
      {"final_nmse", number(r.final_nmse)},
      {"stabilization_step", r.stabilization_step},
      {"steps", r.steps.size()},
      {"skipped_updates", r.skipped_updates},
  };
  open_out(path) << doc.dump(2) << '\n';
}

void write_steps_csv(const RunReport& r, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "step,loss,nmse,innovation_norm,observed\n";
  for (const StepLog& s : r.steps) {
    out << s.step << ',' << num(s.loss) << ',' << num(s.nmse) << ',' << num(s.innovation_norm) << ',' << s.observed
        << '\n';
  }
}

void write_identification(const IdentificationReport& r, const std::filesystem::path& path) {
  json decisions = json::array();
  for (const CandidateDecision& d : r.decisions) {
    decisions.push_back({{"cell", d.cell},
                         {"score", number(d.score)},
                         {"window", {d.window_begin, d.window_end}},
                         {"window_nmse", number(d.window_nmse)},
                         {"benchmark", number(d.benchmark)},
                         {"accepted", d.accepted}});
  }
  json doc = {
      {"warmup", r.warmup},
      {"epsilon", r.epsilon},
      {"warmup_nmse", number(r.warmup_nmse)},
      {"candidates", decisions},
      {"activation", r.activation},
      {"skipped_updates", r.skipped_updates},
  };
  if (r.metrics) {
    const ConfusionMetrics& m = *r.metrics;
    doc["metrics"] = {{"true_positive", m.true_positive},
                      {"false_positive", m.false_positive},
                      {"true_negative", m.true_negative},
                      {"false_negative", m.false_negative},
                      {"accuracy", m.accuracy()},
                      {"precision", m.precision()},
                      {"recall", m.recall()},
                      {"f1", m.f1()}};
  }
  open_out(path) << doc.dump(2) << '\n';
}

void write_spectrum(const SpectralBasis& basis, const Eigen::MatrixXd& spectral_q, const std::filesystem::path& path) {
  json orders = json::array();
  for (const OrderSpectrum& o : basis.orders) {
    json bands = json::array();
    for (Band b : o.bands) bands.push_back(band_name(b));
    orders.push_back({{"eigenvalues", std::vector<double>(o.values.data(), o.values.data() + o.values.size())},
                      {"bands", bands},
                      {"betti", o.harmonic.size()}});
  }
  const Eigen::VectorXd q = spectral_q.diagonal();
  const json doc = {
      {"orders", orders},
      {"rank_b1", basis.rank_gradient},
      {"rank_b2", basis.rank_curl},
      {"spectral_process_cov_diagonal", std::vector<double>(q.data(), q.data() + q.size())},
  };
  open_out(path) << doc.dump(2) << '\n';
}

void write_hodge_csv(const Eigen::MatrixXd& e, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,gradient,curl,harmonic\n";
  for (Eigen::Index t = 0; t < e.rows(); ++t) {
    out << t << ',' << num(e(t, 0)) << ',' << num(e(t, 1)) << ',' << num(e(t, 2)) << '\n';
  }
}

}  // namespace tkf
