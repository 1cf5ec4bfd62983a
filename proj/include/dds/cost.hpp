#pragma once
// Direct latency model: T = T_local + T_net + T_server, all in seconds,
// plus the linear service charge. This path is independent of the
// latency-graph encoding and doubles as its correctness oracle.

#include <stdexcept>

#include "dds/profiles.hpp"
#include "dds/strategy.hpp"
#include "dds/units.hpp"

namespace dds {

struct CostBreakdown {
  double t_local = 0.0;
  double t_net = 0.0;
  double t_server = 0.0;
  double t_total = 0.0;
  double charge = 0.0;  // gamma * a
  double cost = 0.0;    // t_total + charge
};

inline double local_latency(const PartitionStrategy& p, const DeviceProfile& dev) {
  const ModelGraph& g = *p.model;
  double flops = 0.0;
  for (int v : p.local_set) flops += g.vertices[v].flops;
  return dev.alpha_local * flops / dev.compute;
}

// 0 when nothing runs on the server; the sentinel when layers are placed
// there but no resources are allocated (the latency diverges as g -> 0).
inline double server_latency(const PartitionStrategy& p, const ServerProfile& srv,
                             double g_alloc) {
  if (p.server_set.empty()) return 0.0;
  if (g_alloc <= 0.0) return kInfiniteSeconds;
  const ModelGraph& g = *p.model;
  double flops = 0.0;
  for (int v : p.server_set) flops += g.vertices[v].flops;
  return srv.alpha_server * flops / g_alloc;
}

// Cut feature bytes (each fan-out vertex's output counted once), plus the
// raw upload when the source layer is remote and the result download when
// the sink layer is remote.
inline double transmission_latency(const PartitionStrategy& p, const DeviceProfile& dev) {
  const ModelGraph& g = *p.model;
  double bytes = 0.0;
  for (std::size_t k = 0; k < p.cut_edges.size();) {
    int e = p.cut_edges[k];
    int u = g.edges[e].src;
    if (g.out_degree(u) > 1) {
      bytes += g.output_bytes(u);
      while (k < p.cut_edges.size() && g.edges[p.cut_edges[k]].src == u) ++k;
    } else {
      bytes += g.edges[e].feature_bytes;
      ++k;
    }
  }
  if (p.on_server(g.source())) bytes += dev.raw_input_bytes;
  if (p.on_server(g.sink())) bytes += dev.result_bytes;
  return bytes / dev.bandwidth;
}

inline double server_flops(const PartitionStrategy& p, const ModelGraph& g) {
  double flops = 0.0;
  for (int v : p.server_set) flops += g.vertices[v].flops;
  return flops;
}

inline CostBreakdown inference_cost(const PartitionStrategy& p, const DeviceProfile& dev,
                                    const ServerProfile& srv, double g_alloc,
                                    double budget, double gamma) {
  if (budget < 0.0) throw std::invalid_argument("budget must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  CostBreakdown b;
  b.t_local = local_latency(p, dev);
  b.t_net = transmission_latency(p, dev);
  b.t_server = server_latency(p, srv, g_alloc);
  b.t_total = b.t_local + b.t_net + b.t_server;
  b.charge = gamma * budget;
  b.cost = b.t_total + b.charge;
  return b;
}

}  // namespace dds
