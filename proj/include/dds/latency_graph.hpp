#pragma once
// Flow-network encoding of the placement problem. s-t cuts of this graph
// correspond one-to-one to layer placements, and the capacity of a cut
// equals the end-to-end latency of the placement it induces.
//
// Construction, for model graph G and allocation g_alloc:
//   * every model edge keeps its upload time o(e)/b as capacity;
//   * a vertex with fan-out > 1 is split (v, v') so its output upload is
//     charged once: (v, v') carries the upload time, the original fan-out
//     edges are re-tailed to v' with infinite capacity;
//   * virtual nodes: l (device, flow source), s (server, flow sink),
//     i (raw input), o (final output);
//   * (l, i) = raw upload time, (i, v_first) = inf, (l, o) = result
//     download time, (o, v_last) = inf;
//   * per vertex v: (l, v) = server compute time, (v, s) = local compute
//     time. Cutting (v, s) places v on the device, cutting (l, v) places
//     it on the server.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dds/profiles.hpp"
#include "dds/units.hpp"

namespace dds {

enum class ArcTag {
  OriginalEdge,
  SplitEdge,
  LocalCompute,
  ServerCompute,
  RawUpload,
  ResultDownload,
  Infinite,
};

inline const char* to_string(ArcTag t) {
  switch (t) {
    case ArcTag::OriginalEdge: return "original_edge";
    case ArcTag::SplitEdge: return "split_edge";
    case ArcTag::LocalCompute: return "local_compute";
    case ArcTag::ServerCompute: return "server_compute";
    case ArcTag::RawUpload: return "raw_upload";
    case ArcTag::ResultDownload: return "result_download";
    case ArcTag::Infinite: return "infinite";
  }
  return "?";
}

struct LatencyArc {
  int tail = -1;
  int head = -1;
  double capacity = 0.0;  // seconds
  ArcTag tag = ArcTag::Infinite;
  int ref = -1;  // model edge index (OriginalEdge/Infinite re-tails) or
                 // vertex index (SplitEdge, compute arcs); -1 for virtual
};

struct LatencyGraph {
  std::shared_ptr<const ModelGraph> model;
  std::vector<LatencyArc> arcs;
  std::vector<std::string> node_names;
  int node_count = 0;
  int node_local = -1;   // l, flow source
  int node_server = -1;  // s, flow sink
  int node_input = -1;   // i
  int node_output = -1;  // o
  std::vector<int> split_node;  // per model vertex: its v' twin, or -1
};

inline LatencyGraph build_latency_graph(std::shared_ptr<const ModelGraph> model,
                                        const DeviceProfile& dev, double g_alloc,
                                        double alpha_server) {
  validate(dev);
  if (g_alloc < 0.0) throw std::invalid_argument("g_alloc must be >= 0");
  if (!(alpha_server > 0.0)) throw std::invalid_argument("alpha_server must be > 0");

  const ModelGraph& g = *model;
  const int n = g.vertex_count();

  LatencyGraph lg;
  lg.model = std::move(model);
  lg.split_node.assign(n, -1);
  lg.node_names.reserve(n + 6);
  for (const auto& v : g.vertices) lg.node_names.push_back(v.id);
  for (int v = 0; v < n; ++v)
    if (g.out_degree(v) > 1) {
      lg.split_node[v] = static_cast<int>(lg.node_names.size());
      lg.node_names.push_back(g.vertices[v].id + "'");
    }
  lg.node_input = static_cast<int>(lg.node_names.size());
  lg.node_names.push_back("i");
  lg.node_output = static_cast<int>(lg.node_names.size());
  lg.node_names.push_back("o");
  lg.node_local = static_cast<int>(lg.node_names.size());
  lg.node_names.push_back("l");
  lg.node_server = static_cast<int>(lg.node_names.size());
  lg.node_names.push_back("s");
  lg.node_count = static_cast<int>(lg.node_names.size());

  auto arc = [&lg](int tail, int head, double cap, ArcTag tag, int ref) {
    lg.arcs.push_back({tail, head, cap, tag, ref});
  };

  // model edges; fan-out tails are re-routed through the split twin
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& me = g.edges[e];
    if (lg.split_node[me.src] < 0)
      arc(me.src, me.dst, me.feature_bytes / dev.bandwidth, ArcTag::OriginalEdge, e);
    else
      arc(lg.split_node[me.src], me.dst, kInfiniteSeconds, ArcTag::Infinite, e);
  }
  for (int v = 0; v < n; ++v)
    if (lg.split_node[v] >= 0)
      arc(v, lg.split_node[v], g.output_bytes(v) / dev.bandwidth, ArcTag::SplitEdge, v);

  arc(lg.node_local, lg.node_input, dev.raw_input_bytes / dev.bandwidth,
      ArcTag::RawUpload, -1);
  arc(lg.node_input, g.source(), kInfiniteSeconds, ArcTag::Infinite, -1);
  arc(lg.node_local, lg.node_output, dev.result_bytes / dev.bandwidth,
      ArcTag::ResultDownload, -1);
  arc(lg.node_output, g.sink(), kInfiniteSeconds, ArcTag::Infinite, -1);

  for (int v = 0; v < n; ++v) {
    double server_cap = g_alloc > 0.0
                            ? alpha_server * g.vertices[v].flops / g_alloc
                            : kInfiniteSeconds;
    arc(lg.node_local, v, server_cap, ArcTag::ServerCompute, v);
    arc(v, lg.node_server, dev.alpha_local * g.vertices[v].flops / dev.compute,
        ArcTag::LocalCompute, v);
  }
  return lg;
}

// Debug dump, one line per arc: "arc <tail> <head> cap=<float> tag=<tag>".
inline std::string dump_latency_graph(const LatencyGraph& lg) {
  std::string out;
  for (const auto& a : lg.arcs) {
    out += "arc " + lg.node_names[a.tail] + " " + lg.node_names[a.head] +
           " cap=" + detail::fmt_double(a.capacity) + " tag=" + to_string(a.tag) + "\n";
  }
  return out;
}

}  // namespace dds
