#include "tkf/topology.hpp"

#include "tkf/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace tkf {

void CellComplex::set_activation(std::vector<std::uint8_t> activation) {
  if (activation.size() != faces_.size()) {
    throw ShapeMismatch("activation length " + std::to_string(activation.size()) +
                        " does not match pool size " + std::to_string(faces_.size()));
  }
  for (auto& a : activation) {
    if (a > 1) throw ConfigError("activation entries must be 0 or 1");
  }
  activation_ = std::move(activation);
}

void CellComplex::set_active(std::size_t face, bool active) {
  activation_.at(face) = active ? 1 : 0;
}

std::size_t CellComplex::n_active() const {
  return static_cast<std::size_t>(std::count(activation_.begin(), activation_.end(), 1));
}

std::vector<int> CellComplex::boundary_edges(std::size_t face) const {
  std::vector<int> out;
  for (const auto& oe : faces_.at(face)) out.push_back(oe.edge);
  std::sort(out.begin(), out.end());
  return out;
}

CellComplex build_complex(std::size_t n_nodes, const std::vector<Edge>& edges,
                          const std::vector<FaceCycle>& faces) {
  CellComplex cc;
  cc.n_nodes_ = n_nodes;
  cc.edges_ = edges;
  cc.faces_ = faces;

  const auto n1 = static_cast<Eigen::Index>(edges.size());
  cc.b1_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_nodes), n1);
  for (Eigen::Index j = 0; j < n1; ++j) {
    const Edge& e = edges[static_cast<std::size_t>(j)];
    if (e.tail < 0 || e.head < 0 || static_cast<std::size_t>(e.tail) >= n_nodes ||
        static_cast<std::size_t>(e.head) >= n_nodes) {
      throw DanglingIndex("edge " + std::to_string(j) + " references a node outside [0, " +
                          std::to_string(n_nodes) + ")");
    }
    if (e.tail == e.head) throw TopologyError("edge " + std::to_string(j) + " is a self-loop");
    cc.b1_(e.tail, j) = -1.0;
    cc.b1_(e.head, j) = 1.0;
  }

  cc.b2_full_ = Eigen::MatrixXd::Zero(n1, static_cast<Eigen::Index>(faces.size()));
  std::set<std::vector<int>> seen;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& cycle = faces[f];
    if (cycle.empty()) throw TopologyError("face " + std::to_string(f) + " is empty");
    std::vector<int> key;
    for (const auto& oe : cycle) {
      if (oe.edge < 0 || oe.edge >= n1) {
        throw DanglingIndex("face " + std::to_string(f) + " references edge " +
                            std::to_string(oe.edge) + " which is not in the edge list");
      }
      if (oe.sign != 1 && oe.sign != -1) {
        throw TopologyError("face " + std::to_string(f) + " has an orientation other than +-1");
      }
      key.push_back(oe.edge);
    }
    std::sort(key.begin(), key.end());
    if (std::adjacent_find(key.begin(), key.end()) != key.end()) {
      throw TopologyError("face " + std::to_string(f) + " repeats an edge");
    }
    if (!seen.insert(key).second) {
      throw DuplicateFace("face " + std::to_string(f) + " duplicates the edge set of an earlier face");
    }
    for (const auto& oe : cycle) cc.b2_full_(oe.edge, static_cast<Eigen::Index>(f)) = oe.sign;
    const Eigen::VectorXd boundary = cc.b1_ * cc.b2_full_.col(static_cast<Eigen::Index>(f));
    if (boundary.cwiseAbs().maxCoeff() != 0.0) {
      throw NonClosedCycle("face " + std::to_string(f) + " is not a closed cycle");
    }
  }
  cc.activation_.assign(faces.size(), 1);
  return cc;
}

CellComplex build_complex(const std::vector<Edge>& edges, const std::vector<FaceCycle>& faces) {
  int top = -1;
  for (const auto& e : edges) top = std::max({top, e.tail, e.head});
  return build_complex(static_cast<std::size_t>(top + 1), edges, faces);
}

Eigen::MatrixXd masked_b2(const CellComplex& cc) {
  Eigen::MatrixXd b2 = cc.b2_full();
  for (std::size_t f = 0; f < cc.n_faces_pool(); ++f) {
    if (!cc.is_active(f)) b2.col(static_cast<Eigen::Index>(f)).setZero();
  }
  return b2;
}

namespace {

struct Incidence {
  int neighbour;
  int edge;
};

// Depth-first search for simple cycles through nodes larger than `start`.
class CycleSearch {
 public:
  CycleSearch(const std::vector<Edge>& edges, std::size_t max_len, std::size_t cap)
      : edges_(edges), max_len_(max_len), cap_(cap) {
    int top = -1;
    for (const auto& e : edges) top = std::max({top, e.tail, e.head});
    adjacency_.resize(static_cast<std::size_t>(top + 1));
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const auto& e = edges[j];
      if (e.tail == e.head) continue;
      adjacency_[static_cast<std::size_t>(e.tail)].push_back({e.head, static_cast<int>(j)});
      adjacency_[static_cast<std::size_t>(e.head)].push_back({e.tail, static_cast<int>(j)});
    }
    on_path_.assign(adjacency_.size(), false);
  }

  std::map<std::vector<int>, FaceCycle> run() {
    for (std::size_t s = 0; s < adjacency_.size(); ++s) {
      start_ = static_cast<int>(s);
      path_nodes_ = {start_};
      on_path_[s] = true;
      extend(start_);
      on_path_[s] = false;
    }
    return std::move(found_);
  }

 private:
  void extend(int node) {
    for (const auto& inc : adjacency_[static_cast<std::size_t>(node)]) {
      if (!path_edges_.empty() && inc.edge == path_edges_.back()) continue;
      if (inc.neighbour == start_) {
        if (path_edges_.size() + 1 >= 3) record(inc.edge);
        continue;
      }
      if (inc.neighbour < start_ || on_path_[static_cast<std::size_t>(inc.neighbour)]) continue;
      if (path_edges_.size() + 1 >= max_len_) continue;
      on_path_[static_cast<std::size_t>(inc.neighbour)] = true;
      path_nodes_.push_back(inc.neighbour);
      path_edges_.push_back(inc.edge);
      extend(inc.neighbour);
      path_edges_.pop_back();
      path_nodes_.pop_back();
      on_path_[static_cast<std::size_t>(inc.neighbour)] = false;
    }
  }

  void record(int closing_edge) {
    std::vector<int> cycle_edges = path_edges_;
    cycle_edges.push_back(closing_edge);
    std::vector<int> key = cycle_edges;
    std::sort(key.begin(), key.end());
    if (found_.count(key)) return;

    // Canonical direction: from the start node towards the smaller neighbour.
    std::vector<int> nodes = path_nodes_;
    if (nodes[1] > nodes.back()) {
      std::reverse(nodes.begin() + 1, nodes.end());
      std::reverse(cycle_edges.begin(), cycle_edges.end());
    }
    FaceCycle cycle;
    for (std::size_t i = 0; i < cycle_edges.size(); ++i) {
      const int from = nodes[i];
      const Edge& e = edges_[static_cast<std::size_t>(cycle_edges[i])];
      cycle.push_back({cycle_edges[i], e.tail == from ? 1 : -1});
    }
    found_.emplace(std::move(key), std::move(cycle));
    if (found_.size() > cap_) {
      throw PoolOverflow("candidate pool exceeds " + std::to_string(cap_) +
                         " cycles; lower max_cycle_len");
    }
  }

  const std::vector<Edge>& edges_;
  std::size_t max_len_;
  std::size_t cap_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<bool> on_path_;
  int start_ = 0;
  std::vector<int> path_nodes_;
  std::vector<int> path_edges_;
  std::map<std::vector<int>, FaceCycle> found_;
};

}  // namespace

std::vector<FaceCycle> enumerate_candidate_cells(const std::vector<Edge>& edges,
                                                 std::size_t max_cycle_len, std::size_t pool_cap) {
  if (max_cycle_len < 3) throw ConfigError("max_cycle_len must be at least 3");
  CycleSearch search(edges, max_cycle_len, pool_cap);
  auto found = search.run();
  std::vector<FaceCycle> out;
  out.reserve(found.size());
  for (auto& [key, cycle] : found) out.push_back(std::move(cycle));
  return out;
}

}  // namespace tkf
