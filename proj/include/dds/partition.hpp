#pragma once
// Exact minimum cut of a latency graph, mapped back to a layer placement,
// plus an enumeration oracle over all feasible placements. The two compute
// the optimum through disjoint routes (max flow vs direct cost sums).

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dds/cost.hpp"
#include "dds/latency_graph.hpp"
#include "dds/max_flow.hpp"
#include "dds/strategy.hpp"

namespace dds {

struct MinCutResult {
  double cut_value = 0.0;  // optimal total latency, seconds
  PartitionStrategy strategy;
};

// Exact minimum l-s cut over the feasible placements. Among minimum cuts,
// returns the one whose local set equals the nodes reachable from l in the
// residual network (source-side-minimal).
//
// The flow network is the latency graph plus one infinite precedence-guard
// arc (dst -> src) per model edge. Without the guards a cut may place a
// layer on the server while a successor stays local: its inputs would cross
// backward uncharged, which can undercut every feasible placement once the
// result-download arc is in play. A guard arc crosses exactly such cuts, so
// they are never minimal, and no guard changes the value of a feasible cut.
inline MinCutResult min_cut(const LatencyGraph& lg) {
  if (lg.node_count <= 0 || lg.arcs.empty())
    throw std::invalid_argument("empty latency graph");

  MaxFlow flow(lg.node_count);
  for (const auto& a : lg.arcs) flow.add_arc(a.tail, a.head, a.capacity);
  for (const auto& e : lg.model->edges) flow.add_arc(e.dst, e.src, kInfiniteSeconds);

  double flow_value = flow.run(lg.node_local, lg.node_server);
  std::vector<char> reach = flow.source_side();
  if (reach[lg.node_server])
    throw std::invalid_argument("latency graph sink is not separable from source");

  double cut_value = 0.0;
  int crossing = 0;
  for (const auto& a : lg.arcs)
    if (reach[a.tail] && !reach[a.head]) {
      if (a.capacity >= kInfiniteSeconds)
        throw std::logic_error("infinite-capacity arc crossed the minimum cut");
      cut_value += a.capacity;
      ++crossing;
    }
  if (crossing == 0)
    throw std::invalid_argument("latency graph sink is unreachable from the source");
  if (std::abs(cut_value - flow_value) >
      1e-9 * std::max({std::abs(cut_value), std::abs(flow_value), 1e-12}))
    throw std::logic_error("max-flow value and cut capacity disagree");

  const ModelGraph& g = *lg.model;
  std::vector<char> server_mask(g.vertex_count(), 0);
  for (int v = 0; v < g.vertex_count(); ++v) server_mask[v] = reach[v] ? 0 : 1;

  MinCutResult r;
  r.cut_value = cut_value;
  r.strategy = make_strategy(lg.model, server_mask);
  if (!is_valid_cut(r.strategy, g))
    throw std::logic_error("minimum cut mapped to an invalid placement");
  return r;
}

// Enumerates every feasible placement (server sets closed under the
// successor relation), evaluating each directly through the cost model.
// Exponential; guarded to 20 vertices. Ties go to the smaller server set.
inline MinCutResult brute_force_optimal(std::shared_ptr<const ModelGraph> model,
                                        const DeviceProfile& dev, double g_alloc,
                                        double alpha_server) {
  const ModelGraph& g = *model;
  const int n = g.vertex_count();
  if (n > 20) throw std::invalid_argument("graph too large for brute-force enumeration");
  validate(dev);
  if (g_alloc < 0.0) throw std::invalid_argument("g_alloc must be >= 0");

  ServerProfile srv;
  srv.capacity = g_alloc > 0.0 ? g_alloc : 1.0;  // unused beyond alpha
  srv.alpha_server = alpha_server;

  std::vector<std::uint32_t> masks;
  masks.reserve(std::size_t{1} << n);
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });

  bool found = false;
  double best = 0.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask : masks) {
    bool feasible = true;
    for (const auto& e : g.edges)
      if ((mask >> e.src & 1u) && !(mask >> e.dst & 1u)) {
        feasible = false;
        break;
      }
    if (!feasible) continue;

    std::vector<char> server_mask(n, 0);
    for (int v = 0; v < n; ++v) server_mask[v] = (mask >> v) & 1u;
    PartitionStrategy p = make_strategy(model, server_mask);
    double t = local_latency(p, dev) + transmission_latency(p, dev) +
               server_latency(p, srv, g_alloc);
    if (!found || t < best) {
      found = true;
      best = t;
      best_mask = mask;
    }
  }

  std::vector<char> server_mask(n, 0);
  for (int v = 0; v < n; ++v) server_mask[v] = (best_mask >> v) & 1u;
  MinCutResult r;
  r.cut_value = best;
  r.strategy = make_strategy(std::move(model), server_mask);
  return r;
}

}  // namespace dds
