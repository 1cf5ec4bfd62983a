#pragma once
// Dinic's algorithm on real-valued capacities. Exact for this problem
// size: augmenting-path bottlenecks zero out one arc per step, and the
// saturation threshold is scaled from the total finite capacity so
// floating-point dust cannot keep phases alive.

#include <queue>
#include <stdexcept>
#include <vector>

#include "dds/units.hpp"

namespace dds {

class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : adj_(nodes) {}

  void add_arc(int from, int to, double capacity) {
    adj_[from].push_back({to, static_cast<int>(adj_[to].size()), capacity});
    adj_[to].push_back({from, static_cast<int>(adj_[from].size()) - 1, 0.0});
  }

  // Max flow from source to sink; callable once per instance.
  double run(int source, int sink) {
    source_ = source;
    // scale the saturation threshold to the flow value, which is bounded by
    // the cheaper of the two terminal capacity sums; individual arcs can be
    // many orders of magnitude larger and would swamp a total-based scale
    double out_sum = 0.0, in_sum = 0.0;
    for (int v = 0; v < static_cast<int>(adj_.size()); ++v)
      for (const auto& a : adj_[v])
        if (a.cap > 0.0 && a.cap < kInfiniteSeconds) {
          if (v == source) out_sum += a.cap;
          if (a.to == sink) in_sum += a.cap;
        }
    eps_ = std::max(std::min(out_sum, in_sum), 1e-30) * 1e-13;

    double flow = 0.0;
    while (bfs_levels(source, sink)) {
      iter_.assign(adj_.size(), 0);
      while (true) {
        double pushed = dfs(source, sink, kInfiniteSeconds);
        if (pushed <= 0.0) break;
        flow += pushed;
      }
    }
    ran_ = true;
    return flow;
  }

  // Nodes reachable from the source in the residual network; the canonical
  // source-side-minimal min cut.
  std::vector<char> source_side() const {
    if (!ran_) throw std::logic_error("source_side() before run()");
    std::vector<char> seen(adj_.size(), 0);
    std::queue<int> q;
    seen[source_] = 1;
    q.push(source_);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& a : adj_[v])
        if (!seen[a.to] && a.cap > eps_) {
          seen[a.to] = 1;
          q.push(a.to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
  };

  bool bfs_levels(int source, int sink) {
    level_.assign(adj_.size(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto& a : adj_[v])
        if (level_[a.to] < 0 && a.cap > eps_) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
    }
    return level_[sink] >= 0;
  }

  double dfs(int v, int sink, double limit) {
    if (v == sink) return limit;
    for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      Arc& a = adj_[v][i];
      if (a.cap <= eps_ || level_[a.to] != level_[v] + 1) continue;
      double pushed = dfs(a.to, sink, std::min(limit, a.cap));
      if (pushed > 0.0) {
        a.cap -= pushed;
        adj_[a.to][a.rev].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
  double eps_ = 0.0;
  int source_ = -1;
  bool ran_ = false;
};

}  // namespace dds
