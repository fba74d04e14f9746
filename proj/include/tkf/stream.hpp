#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace tkf {

// T x N observations in cell order (nodes, edges, faces). NaN marks a
// missing entry. Latent ground truth is only present for synthetic data.
struct ObservationStream {
  Eigen::MatrixXd observations;
  std::optional<Eigen::MatrixXd> latent;

  std::size_t length() const { return static_cast<std::size_t>(observations.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(observations.cols()); }
  double missing_fraction() const;
};

// Each entry is removed independently with probability `rate`.
ObservationStream apply_missing(const ObservationStream& stream, double rate, std::uint64_t seed);

// CSV with header `t,signal_0,...,signal_{N-1}`; missing entries are `nan`.
// Values are written with 17 significant digits so a round trip is exact.
void write_stream_csv(const Eigen::MatrixXd& values, const std::filesystem::path& path);
Eigen::MatrixXd read_stream_csv(const std::filesystem::path& path);

}  // namespace tkf
