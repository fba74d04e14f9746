#include "tkf/errors.hpp"
#include "tkf/topology.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>

namespace tkf {

using nlohmann::json;

CellComplex load_complex(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open complex file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed complex file " + path.string() + ": " + e.what());
  }
  try {
    const auto n_nodes = doc.at("nodes").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& pair : doc.at("edges")) {
      if (pair.size() != 2) throw ConfigError("edges must be [tail, head] pairs");
      edges.push_back({pair[0].get<int>(), pair[1].get<int>()});
    }
    std::vector<FaceCycle> faces;
    if (doc.contains("faces")) {
      for (const auto& face : doc.at("faces")) {
        FaceCycle cycle;
        for (const auto& code : face) {
          const int v = code.get<int>();
          if (v == 0) throw ConfigError("face entries are +-(edge index + 1); 0 is invalid");
          cycle.push_back({std::abs(v) - 1, v > 0 ? 1 : -1});
        }
        faces.push_back(std::move(cycle));
      }
    }
    CellComplex cc = build_complex(n_nodes, edges, faces);
    if (doc.contains("activation")) {
      cc.set_activation(doc.at("activation").get<std::vector<std::uint8_t>>());
    }
    return cc;
  } catch (const json::exception& e) {
    throw ConfigError("invalid complex file " + path.string() + ": " + e.what());
  }
}

void save_complex(const CellComplex& cc, const std::filesystem::path& path) {
  json doc;
  doc["nodes"] = cc.n_nodes();
  doc["edges"] = json::array();
  for (const auto& e : cc.edge_list()) doc["edges"].push_back({e.tail, e.head});
  doc["faces"] = json::array();
  for (const auto& cycle : cc.face_cycles()) {
    json face = json::array();
    for (const auto& oe : cycle) face.push_back(oe.sign * (oe.edge + 1));
    doc["faces"].push_back(std::move(face));
  }
  doc["activation"] = cc.activation();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write complex file " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace tkf
