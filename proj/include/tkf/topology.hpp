#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace tkf {

// Oriented node pair: the edge points from `tail` to `head`.
struct Edge {
  int tail = 0;
  int head = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// One step of a face boundary walk. `sign` is +1 when the walk follows the
// stored edge direction and -1 otherwise.
struct OrientedEdge {
  int edge = 0;
  int sign = 1;
  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

using FaceCycle = std::vector<OrientedEdge>;

// Oriented 2nd-order cell complex with a candidate pool of 2-cells.
//
// The incidence matrices are stored dense. Entries are small integers held
// in doubles, so products of incidence matrices are exact. Only the
// activation vector may change after construction; masked_b2() applies it.
class CellComplex {
 public:
  CellComplex() = default;

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_edges() const { return edges_.size(); }
  std::size_t n_faces_pool() const { return faces_.size(); }
  // N0 + N1 + N2 (pool size).
  std::size_t dimension() const { return n_nodes() + n_edges() + n_faces_pool(); }

  const Eigen::MatrixXd& b1() const { return b1_; }
  const Eigen::MatrixXd& b2_full() const { return b2_full_; }
  const std::vector<Edge>& edge_list() const { return edges_; }
  const std::vector<FaceCycle>& face_cycles() const { return faces_; }

  const std::vector<std::uint8_t>& activation() const { return activation_; }
  void set_activation(std::vector<std::uint8_t> activation);
  void set_active(std::size_t face, bool active);
  bool is_active(std::size_t face) const { return activation_.at(face) != 0; }
  std::size_t n_active() const;

  // Sorted boundary edge indices of candidate face `face`.
  std::vector<int> boundary_edges(std::size_t face) const;

  friend CellComplex build_complex(std::size_t, const std::vector<Edge>&,
                                   const std::vector<FaceCycle>&);

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<FaceCycle> faces_;
  Eigen::MatrixXd b1_;
  Eigen::MatrixXd b2_full_;
  std::vector<std::uint8_t> activation_;
};

// Validates the combinatorics and assembles B1 and B2*. Every candidate
// face starts active.
//
// Throws DanglingIndex for out-of-range node or edge indices, NonClosedCycle
// when B1 does not annihilate a face boundary, DuplicateFace when two faces
// share an unordered edge set, and TopologyError for self-loops, empty faces
// or faces that repeat an edge.
CellComplex build_complex(std::size_t n_nodes, const std::vector<Edge>& edges,
                          const std::vector<FaceCycle>& faces);

// Node count inferred as 1 + the largest endpoint index.
CellComplex build_complex(const std::vector<Edge>& edges, const std::vector<FaceCycle>& faces);

// B2 = B2* diag(e). Shape is N1 x N2 regardless of the activation.
Eigen::MatrixXd masked_b2(const CellComplex& cc);

inline constexpr std::size_t kDefaultMaxCycleLength = 8;
inline constexpr std::size_t kDefaultPoolCap = 512;

// All simple cycles of length 3..max_cycle_len in the 1-skeleton, one per
// unordered edge set. Each cycle starts at its smallest node and walks
// towards the smaller of that node's two cycle neighbours. Output is sorted
// lexicographically by sorted edge indices. Throws PoolOverflow when more
// than `pool_cap` cycles exist.
std::vector<FaceCycle> enumerate_candidate_cells(const std::vector<Edge>& edges,
                                                 std::size_t max_cycle_len = kDefaultMaxCycleLength,
                                                 std::size_t pool_cap = kDefaultPoolCap);

// Complex description file: {"nodes": N0, "edges": [[u,v],...],
// "faces": [[+-(edge+1),...],...]} plus an optional "activation" array.
CellComplex load_complex(const std::filesystem::path& path);
void save_complex(const CellComplex& cc, const std::filesystem::path& path);

}  // namespace tkf
