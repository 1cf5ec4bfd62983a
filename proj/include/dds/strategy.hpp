#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include "dds/model_graph.hpp"

namespace dds {

// A layer placement: the model's vertex set split into a device-side part
// and a server-side part, together with the model edges crossing from local
// to server. Vertex/edge members are indices into the owning ModelGraph.
struct PartitionStrategy {
  std::shared_ptr<const ModelGraph> model;
  std::vector<int> local_set;   // sorted vertex indices executed on device
  std::vector<int> server_set;  // sorted vertex indices executed on server
  std::vector<int> cut_edges;   // sorted model-edge indices, local -> server
  bool raw_input_cut = false;   // true iff the source layer runs on the server

  bool on_server(int v) const {
    return std::binary_search(server_set.begin(), server_set.end(), v);
  }
};

// Derives local/server sets, cut edges and the raw-input flag from a
// server-membership mask. Does not enforce validity; see is_valid_cut.
inline PartitionStrategy make_strategy(std::shared_ptr<const ModelGraph> model,
                                       const std::vector<char>& server_mask) {
  PartitionStrategy p;
  const ModelGraph& g = *model;
  p.model = std::move(model);
  for (int v = 0; v < g.vertex_count(); ++v)
    (server_mask[v] ? p.server_set : p.local_set).push_back(v);
  for (int e = 0; e < g.edge_count(); ++e)
    if (!server_mask[g.edges[e].src] && server_mask[g.edges[e].dst])
      p.cut_edges.push_back(e);
  p.raw_input_cut = server_mask[g.source()] != 0;
  return p;
}

inline PartitionStrategy all_local(std::shared_ptr<const ModelGraph> model) {
  std::vector<char> mask(model->vertex_count(), 0);
  return make_strategy(std::move(model), mask);
}

inline PartitionStrategy all_server(std::shared_ptr<const ModelGraph> model) {
  std::vector<char> mask(model->vertex_count(), 1);
  return make_strategy(std::move(model), mask);
}

// True iff no model edge runs from the server set back to the local set,
// i.e. once execution moves to the server it never returns to the device.
inline bool is_valid_cut(const PartitionStrategy& p, const ModelGraph& g) {
  std::vector<char> server(g.vertex_count(), 0);
  for (int v : p.server_set) server[v] = 1;
  for (const auto& e : g.edges)
    if (server[e.src] && !server[e.dst]) return false;
  return true;
}

}  // namespace dds
