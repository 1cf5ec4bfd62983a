#pragma once
// Shared helpers for the test and acceptance suites.

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "dds/model_graph.hpp"
#include "dds/profiles.hpp"
#include "dds/rng.hpp"

namespace dds::testing {

// Random single-source/single-sink DAG with positive weights, |V| <= 8.
inline std::shared_ptr<const ModelGraph> random_dag(Rng& rng) {
  int n = 1 + static_cast<int>(rng.below(8));
  std::vector<LayerVertex> vs(n);
  for (int i = 0; i < n; ++i) {
    vs[i].id = "v" + std::to_string(i + 1);
    vs[i].flops = rng.log_uniform(1e6, 1e10);
  }
  std::map<std::pair<int, int>, double> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < 0.35) edges[{i, j}] = rng.log_uniform(1e3, 1e6);
  // enforce one source and one sink
  for (int j = 1; j < n; ++j) {
    bool has_in = false;
    for (int i = 0; i < j; ++i) has_in = has_in || edges.count({i, j});
    if (!has_in) edges[{static_cast<int>(rng.below(j)), j}] = rng.log_uniform(1e3, 1e6);
  }
  for (int i = 0; i + 1 < n; ++i) {
    bool has_out = false;
    for (int j = i + 1; j < n; ++j) has_out = has_out || edges.count({i, j});
    if (!has_out)
      edges[{i, i + 1 + static_cast<int>(rng.below(n - i - 1))}] = rng.log_uniform(1e3, 1e6);
  }
  std::vector<std::tuple<std::string, std::string, double>> raw;
  for (const auto& [key, bytes] : edges)
    raw.emplace_back(vs[key.first].id, vs[key.second].id, bytes);
  return std::make_shared<const ModelGraph>(build_model("rand", std::move(vs), std::move(raw)));
}

inline DeviceProfile random_device(Rng& rng, std::shared_ptr<const ModelGraph> model) {
  DeviceProfile d;
  d.id = "r";
  d.compute = rng.log_uniform(1e9, 1e11);
  d.bandwidth = rng.log_uniform(1e5, 1e7);
  d.alpha_local = rng.uniform(0.5, 2.0);
  d.raw_input_bytes = rng.log_uniform(1e4, 1e6);
  d.result_bytes = rng.log_uniform(1e2, 1e4);
  d.model = std::move(model);
  return d;
}

}  // namespace dds::testing
