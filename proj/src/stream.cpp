#include "tkf/stream.hpp"

#include "tkf/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace tkf {

double ObservationStream::missing_fraction() const {
  if (observations.size() == 0) return 0.0;
  return static_cast<double>(observations.array().isNaN().count()) / static_cast<double>(observations.size());
}

ObservationStream apply_missing(const ObservationStream& stream, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("missing rate must lie in [0, 1)");
  ObservationStream out = stream;
  if (rate == 0.0) return out;
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution drop(rate);
  for (Eigen::Index t = 0; t < out.observations.rows(); ++t) {
    for (Eigen::Index i = 0; i < out.observations.cols(); ++i) {
      if (drop(gen)) out.observations(t, i) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

void write_stream_csv(const Eigen::MatrixXd& values, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << 't';
  for (Eigen::Index i = 0; i < values.cols(); ++i) out << ",signal_" << i;
  out << '\n';
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
      const double v = values(t, i);
      out << ',';
      if (std::isnan(v)) out << "nan";
      else out << fmt::format("{:.17g}", v);
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_stream_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stream file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("stream file " + path.string() + " is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "t") throw ConfigError("stream header must start with 't'");
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "signal_" + std::to_string(i - 1)) {
      throw ConfigError("stream header column " + std::to_string(i) + " must be signal_" + std::to_string(i - 1));
    }
  }
  const std::size_t width = header.size() - 1;

  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col > 0) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str()) throw ConfigError("non-numeric stream entry '" + cell + "' on row " + std::to_string(rows));
        data.push_back(v);
      }
      ++col;
    }
    if (col != width + 1) throw ConfigError("stream row " + std::to_string(rows) + " has the wrong number of columns");
    ++rows;
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * width + c];
    }
  }
  return out;
}

}  // namespace tkf
