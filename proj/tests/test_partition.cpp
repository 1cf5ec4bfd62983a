#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "dds/cost.hpp"
#include "dds/latency_graph.hpp"
#include "dds/partition.hpp"
#include "dds/rng.hpp"
#include "support.hpp"

using namespace dds;
using dds::testing::random_dag;

namespace {

std::shared_ptr<const ModelGraph> diamond() {
  return std::make_shared<const ModelGraph>(parse_model(
      "model diamond\n"
      "vertex v1 flops=1e9\nvertex v2 flops=2e9\nvertex v3 flops=3e9\nvertex v4 flops=4e9\n"
      "edge v1 v2 bytes=100000\nedge v1 v3 bytes=100000\n"
      "edge v2 v4 bytes=50000\nedge v3 v4 bytes=60000\n"));
}

DeviceProfile test_device(std::shared_ptr<const ModelGraph> model, double compute = 1e10,
                          double bandwidth = 1e6) {
  DeviceProfile d;
  d.id = "t";
  d.compute = compute;
  d.bandwidth = bandwidth;
  d.model = std::move(model);
  return d;
}

}  // namespace

TEST_CASE("latency graph counts follow the construction rules") {
  SECTION("diamond: one split vertex") {
    auto g = diamond();
    auto lg = build_latency_graph(g, test_device(g), 1e10, 1.0);
    CHECK(lg.node_count == 9);       // 4 + 1 split + 4 virtual
    CHECK(lg.arcs.size() == 17u);    // 4 original + 1 split + 4 virtual + 8 compute
    std::map<ArcTag, int> by_tag;
    for (const auto& a : lg.arcs) by_tag[a.tag] += 1;
    CHECK(by_tag[ArcTag::SplitEdge] == 1);
    CHECK(by_tag[ArcTag::OriginalEdge] == 2);  // v2->v4, v3->v4
    CHECK(by_tag[ArcTag::Infinite] == 4);      // 2 re-tailed fan-outs + (i,v1) + (o,v4)
    CHECK(by_tag[ArcTag::LocalCompute] == 4);
    CHECK(by_tag[ArcTag::ServerCompute] == 4);
    CHECK(by_tag[ArcTag::RawUpload] == 1);
    CHECK(by_tag[ArcTag::ResultDownload] == 1);
  }
  SECTION("two-vertex chain: no splits") {
    auto g = std::make_shared<const ModelGraph>(parse_model(
        "model chain\nvertex a flops=1e9\nvertex b flops=1e9\nedge a b bytes=1000\n"));
    auto lg = build_latency_graph(g, test_device(g), 1e10, 1.0);
    CHECK(lg.node_count == 6);     // 2 + 0 + 4
    CHECK(lg.arcs.size() == 9u);   // 1 + 0 + 4 + 4
  }
  SECTION("g_alloc = 0 puts the sentinel on every server arc") {
    auto g = diamond();
    auto lg = build_latency_graph(g, test_device(g), 0.0, 1.0);
    for (const auto& a : lg.arcs)
      if (a.tag == ArcTag::ServerCompute) CHECK(a.capacity == kInfiniteSeconds);
  }
  SECTION("invalid profiles are rejected") {
    auto g = diamond();
    auto dev = test_device(g);
    dev.bandwidth = 0.0;
    CHECK_THROWS_AS(build_latency_graph(g, dev, 1e10, 1.0), std::invalid_argument);
    dev = test_device(g);
    dev.compute = -1.0;
    CHECK_THROWS_AS(build_latency_graph(g, dev, 1e10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_latency_graph(g, test_device(g), -1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("latency graph capacities follow the construction formulas") {
  auto g = diamond();  // f = 1,2,3,4 GFLOP; fan-out at v1
  DeviceProfile dev = test_device(g, /*compute=*/1e10, /*bandwidth=*/1e6);
  dev.raw_input_bytes = 250000.0;
  dev.result_bytes = 4000.0;
  const double g_alloc = 2e10;
  const double alpha_s = 0.5;
  auto lg = build_latency_graph(g, dev, g_alloc, alpha_s);

  auto find = [&](ArcTag tag, int ref) -> const LatencyArc& {
    for (const auto& a : lg.arcs)
      if (a.tag == tag && a.ref == ref) return a;
    FAIL("arc not found");
    return lg.arcs.front();
  };

  // v2 -> v4 keeps its upload time; v1's fan-out goes through the split
  CHECK(find(ArcTag::OriginalEdge, 2).capacity == 50000.0 / 1e6);
  CHECK(find(ArcTag::SplitEdge, 0).capacity == 100000.0 / 1e6);
  CHECK(find(ArcTag::Infinite, 0).capacity == kInfiniteSeconds);  // re-tailed v1->v2
  // compute arcs: server alpha_s*f/g, local alpha_i*f/E
  CHECK(find(ArcTag::ServerCompute, 1).capacity == 0.5 * 2e9 / 2e10);
  CHECK(find(ArcTag::LocalCompute, 3).capacity == 4e9 / 1e10);
  // virtual terminals
  CHECK(find(ArcTag::RawUpload, -1).capacity == 250000.0 / 1e6);
  CHECK(find(ArcTag::ResultDownload, -1).capacity == 4000.0 / 1e6);
  // the split twin fans out, raw feeds the first layer, output drains the sink
  const auto& retail = find(ArcTag::Infinite, 0);
  CHECK(retail.tail == lg.split_node[0]);
  CHECK(retail.head == 1);
}

TEST_CASE("latency graph dump lists every arc with its tag") {
  auto g = diamond();
  auto lg = build_latency_graph(g, test_device(g), 1e10, 1.0);
  std::string dump = dump_latency_graph(lg);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 17);
  CHECK(dump.find("arc l i cap=") != std::string::npos);
  CHECK(dump.find("tag=split_edge") != std::string::npos);
  CHECK(dump.find("arc v1 v1' cap=") != std::string::npos);
}

TEST_CASE("single-layer model picks the cheaper placement") {
  // local 10 s; raw upload 2 s + server 1 s + download 0.5 s = 3.5 s
  auto g = std::make_shared<const ModelGraph>(parse_model("model one\nvertex v1 flops=1e10\n"));
  DeviceProfile dev = test_device(g, /*compute=*/1e9, /*bandwidth=*/1e6);
  dev.raw_input_bytes = 2e6;
  dev.result_bytes = 5e5;
  double g_alloc = 1e10;

  auto lg = build_latency_graph(g, dev, g_alloc, 1.0);
  auto mc = min_cut(lg);
  CHECK(mc.cut_value == Catch::Approx(3.5).epsilon(1e-12));
  CHECK(mc.strategy.server_set == std::vector<int>{0});
  CHECK(mc.strategy.raw_input_cut);

  auto bf = brute_force_optimal(g, dev, g_alloc, 1.0);
  CHECK(bf.cut_value == Catch::Approx(3.5).epsilon(1e-12));
  CHECK(bf.strategy.server_set == std::vector<int>{0});

  SECTION("slow server flips it local") {
    auto local = min_cut(build_latency_graph(g, dev, 1e8, 1.0));
    CHECK(local.cut_value == Catch::Approx(10.0).epsilon(1e-12));
    CHECK(local.strategy.server_set.empty());
  }
}

TEST_CASE("g_alloc = 0 forces the all-local placement") {
  auto g = diamond();
  auto dev = test_device(g);
  auto mc = min_cut(build_latency_graph(g, dev, 0.0, 1.0));
  CHECK(mc.strategy.server_set.empty());
  CHECK(mc.cut_value == Catch::Approx(1.0).epsilon(1e-12));  // 10e9 / 1e10
  auto bf = brute_force_optimal(g, dev, 0.0, 1.0);
  CHECK(bf.strategy.server_set.empty());
}

TEST_CASE("vanishing bandwidth forces the all-local placement") {
  auto g = diamond();
  auto dev = test_device(g, 1e10, 1e-6);  // uploads cost ~1e11 s
  auto mc = min_cut(build_latency_graph(g, dev, 1e15, 1.0));
  CHECK(mc.strategy.server_set.empty());
  CHECK(mc.cut_value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("is_valid_cut accepts forward cuts and rejects backward ones") {
  auto g = diamond();
  PartitionStrategy blue = make_strategy(g, {0, 1, 1, 1});  // v1 local, rest server
  CHECK(is_valid_cut(blue, *g));

  PartitionStrategy red = make_strategy(g, {1, 0, 1, 1});  // v1 server, v2 local
  CHECK_FALSE(is_valid_cut(red, *g));

  CHECK(is_valid_cut(all_local(g), *g));
  CHECK(is_valid_cut(all_server(g), *g));
}

TEST_CASE("min cut rejects malformed latency graphs") {
  auto g = std::make_shared<const ModelGraph>(parse_model("model one\nvertex v1 flops=1\n"));

  SECTION("an uncuttable bypass trips the sentinel check") {
    LatencyGraph lg = build_latency_graph(g, test_device(g), 1e9, 1.0);
    lg.arcs.push_back({lg.node_local, lg.node_server, kInfiniteSeconds, ArcTag::Infinite, -1});
    CHECK_THROWS_AS(min_cut(lg), std::logic_error);
  }
  SECTION("a sink with no incoming capacity is unreachable") {
    LatencyGraph lg = build_latency_graph(g, test_device(g), 1e9, 1.0);
    std::erase_if(lg.arcs, [&](const LatencyArc& a) { return a.head == lg.node_server; });
    CHECK_THROWS_AS(min_cut(lg), std::invalid_argument);
  }
  SECTION("empty graph") {
    CHECK_THROWS_AS(min_cut(LatencyGraph{}), std::invalid_argument);
  }
}

TEST_CASE("brute force refuses oversized graphs") {
  std::vector<LayerVertex> vs(21);
  std::vector<std::tuple<std::string, std::string, double>> es;
  for (int i = 0; i < 21; ++i) {
    vs[i].id = "v" + std::to_string(i);
    vs[i].flops = 1.0;
    if (i) es.emplace_back(vs[i - 1].id, vs[i].id, 1.0);
  }
  auto g = std::make_shared<const ModelGraph>(build_model("big", std::move(vs), std::move(es)));
  CHECK_THROWS_AS(brute_force_optimal(g, test_device(g), 1e9, 1.0), std::invalid_argument);
}

TEST_CASE("min cut matches the enumeration oracle on random DAGs") {
  Rng rng(20240817);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto g = random_dag(rng);
    DeviceProfile dev = test_device(g, rng.log_uniform(1e9, 1e11), rng.log_uniform(1e5, 1e7));
    dev.raw_input_bytes = rng.log_uniform(1e4, 1e6);
    dev.result_bytes = rng.log_uniform(1e2, 1e4);
    double g_alloc = rng.uniform01() < 0.1 ? 0.0 : rng.log_uniform(1e9, 1e12);
    double alpha_s = rng.uniform(0.5, 2.0);
    dev.alpha_local = rng.uniform(0.5, 2.0);

    auto lg = build_latency_graph(g, dev, g_alloc, alpha_s);
    auto mc = min_cut(lg);
    auto bf = brute_force_optimal(g, dev, g_alloc, alpha_s);

    INFO("trial " << trial << " |V|=" << g->vertex_count() << " g_alloc=" << g_alloc);
    CHECK(mc.cut_value == Catch::Approx(bf.cut_value).epsilon(1e-9));
    CHECK(is_valid_cut(mc.strategy, *g));
    CHECK(is_valid_cut(bf.strategy, *g));

    // cut value reconstructs through the direct cost model
    ServerProfile srv{std::max(g_alloc, 1.0), alpha_s};
    CostBreakdown cb = inference_cost(mc.strategy, dev, srv, g_alloc, 0.0, 1e-18);
    CHECK(cb.t_total == Catch::Approx(mc.cut_value).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("cut value is monotone in allocation and bandwidth") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_dag(rng);
    DeviceProfile dev = test_device(g, rng.log_uniform(1e9, 1e11), rng.log_uniform(1e5, 1e7));
    double g_lo = rng.log_uniform(1e8, 1e10);
    double g_hi = g_lo * rng.uniform(1.5, 20.0);
    double lo = min_cut(build_latency_graph(g, dev, g_lo, 1.0)).cut_value;
    double hi = min_cut(build_latency_graph(g, dev, g_hi, 1.0)).cut_value;
    CHECK(hi <= lo * (1.0 + 1e-12));

    DeviceProfile wide = dev;
    wide.bandwidth = dev.bandwidth * rng.uniform(1.5, 20.0);
    double narrow_cut = min_cut(build_latency_graph(g, dev, g_lo, 1.0)).cut_value;
    double wide_cut = min_cut(build_latency_graph(g, wide, g_lo, 1.0)).cut_value;
    CHECK(wide_cut <= narrow_cut * (1.0 + 1e-12));
  }
}

TEST_CASE("min cut tie-break returns the source-side-minimal cut") {
  // both placements cost exactly 2 s: local = 2e9/1e9; server = 0.5 (raw)
  // + 1.0 (compute at g = f) + 0.5 (download), all exactly representable
  auto g = std::make_shared<const ModelGraph>(parse_model("model one\nvertex v1 flops=2e9\n"));
  DeviceProfile dev = test_device(g, 1e9, 1e6);
  dev.raw_input_bytes = 5e5;
  dev.result_bytes = 5e5;
  auto mc = min_cut(build_latency_graph(g, dev, 2e9, 1.0));
  // at an exact tie the residual network keeps the source side minimal:
  // the vertex lands on the server side
  CHECK(mc.cut_value == 2.0);
  CHECK(mc.strategy.server_set.size() == 1);
}
