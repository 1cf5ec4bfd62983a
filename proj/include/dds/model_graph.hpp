#pragma once
// DNN models as weighted DAGs: text-format ingestion, canonical
// serialization, and synthetic catalog models that reproduce published
// aggregate metrics (layer count, edge count, total GFLOPs).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dds/rng.hpp"

namespace dds {

struct LayerVertex {
  std::string id;
  double flops = 0.0;  // FLOP, strictly positive
  std::string label;
};

struct FeatureEdge {
  int src = -1;  // vertex indices in topological order
  int dst = -1;
  double feature_bytes = 0.0;
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable after construction (always built through build_model); safe to
// share across threads without synchronization.
struct ModelGraph {
  std::string name;
  std::vector<LayerVertex> vertices;       // topological order; 0 is the source
  std::vector<FeatureEdge> edges;          // sorted by (src, dst)
  std::vector<std::vector<int>> out_edges; // per vertex, edge indices, dst ascending
  std::vector<std::vector<int>> in_edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int source() const { return 0; }
  int sink() const { return vertex_count() - 1; }
  int out_degree(int v) const { return static_cast<int>(out_edges[v].size()); }

  const std::string& source_id() const { return vertices[source()].id; }
  const std::string& sink_id() const { return vertices[sink()].id; }

  // Upload size charged when vertex v's output crosses to the server: the
  // feature size of its first outgoing edge in topological order. Fan-out
  // edges are expected to carry equal sizes (see fanout_size_warnings).
  double output_bytes(int v) const {
    return out_edges[v].empty() ? 0.0 : edges[out_edges[v].front()].feature_bytes;
  }

  int index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? -1 : it->second;
  }

  std::unordered_map<std::string, int> index_;
};

namespace detail {

inline bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

// Validates the type invariants and canonicalizes: vertices are reordered
// topologically (stable: ties resolved by declaration order) and edges are
// sorted by (src, dst). Throws ModelError.
inline ModelGraph build_model(std::string name,
                              std::vector<LayerVertex> raw_vertices,
                              std::vector<std::tuple<std::string, std::string, double>> raw_edges) {
  if (raw_vertices.empty()) throw ModelError("model has no vertices");

  std::unordered_map<std::string, int> pos;
  for (int i = 0; i < static_cast<int>(raw_vertices.size()); ++i) {
    const auto& v = raw_vertices[i];
    if (v.id.empty()) throw ModelError("empty vertex id");
    if (!pos.emplace(v.id, i).second)
      throw ModelError("duplicate vertex id '" + v.id + "'");
    if (!detail::positive_finite(v.flops))
      throw ModelError("vertex '" + v.id + "': flops must be a positive finite number");
  }

  const int n = static_cast<int>(raw_vertices.size());
  std::vector<std::vector<int>> succ(n);
  std::vector<int> in_deg(n, 0);
  std::set<std::pair<int, int>> seen;
  for (const auto& [sid, did, bytes] : raw_edges) {
    auto si = pos.find(sid), di = pos.find(did);
    if (si == pos.end())
      throw ModelError("edge references unknown vertex '" + sid + "'");
    if (di == pos.end())
      throw ModelError("edge references unknown vertex '" + did + "'");
    if (si->second == di->second)
      throw ModelError("self-loop on vertex '" + sid + "'");
    if (!seen.emplace(si->second, di->second).second)
      throw ModelError("duplicate edge " + sid + " -> " + did);
    if (!detail::positive_finite(bytes))
      throw ModelError("edge " + sid + " -> " + did +
                       ": bytes must be a positive finite number");
    succ[si->second].push_back(di->second);
    in_deg[di->second] += 1;
  }

  // Kahn with an index-ordered ready set; detects cycles and enforces the
  // unique source. Already-sorted input comes back in the same order.
  std::set<int> ready;
  for (int i = 0; i < n; ++i)
    if (in_deg[i] == 0) ready.insert(i);
  if (ready.empty()) throw ModelError("cycle detected: no source vertex");
  if (ready.size() > 1) {
    std::string ids;
    for (int i : ready) ids += (ids.empty() ? "" : ", ") + raw_vertices[i].id;
    throw ModelError("multiple source vertices: " + ids);
  }

  std::vector<int> order;
  order.reserve(n);
  std::vector<int> deg = in_deg;
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int w : succ[v])
      if (--deg[w] == 0) ready.insert(w);
  }
  if (static_cast<int>(order.size()) != n) throw ModelError("cycle detected");

  int sinks = 0;
  std::string sink_ids;
  for (int i = 0; i < n; ++i)
    if (succ[i].empty()) {
      ++sinks;
      sink_ids += (sink_ids.empty() ? "" : ", ") + raw_vertices[i].id;
    }
  if (sinks != 1) throw ModelError("multiple sink vertices: " + sink_ids);

  std::vector<int> new_index(n);
  for (int k = 0; k < n; ++k) new_index[order[k]] = k;

  ModelGraph g;
  g.name = std::move(name);
  g.vertices.reserve(n);
  for (int k = 0; k < n; ++k) g.vertices.push_back(std::move(raw_vertices[order[k]]));
  for (int k = 0; k < n; ++k) g.index_[g.vertices[k].id] = k;

  g.edges.reserve(raw_edges.size());
  for (const auto& [sid, did, bytes] : raw_edges) {
    FeatureEdge e;
    e.src = new_index[pos[sid]];
    e.dst = new_index[pos[did]];
    e.feature_bytes = bytes;
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const FeatureEdge& a, const FeatureEdge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });

  g.out_edges.assign(n, {});
  g.in_edges.assign(n, {});
  for (int e = 0; e < g.edge_count(); ++e) {
    g.out_edges[g.edges[e].src].push_back(e);
    g.in_edges[g.edges[e].dst].push_back(e);
  }

  // every vertex must lie on some source -> sink path
  std::vector<char> fwd(n, 0), bwd(n, 0);
  fwd[g.source()] = 1;
  for (int v = 0; v < n; ++v)
    if (fwd[v])
      for (int e : g.out_edges[v]) fwd[g.edges[e].dst] = 1;
  bwd[g.sink()] = 1;
  for (int v = n - 1; v >= 0; --v)
    if (bwd[v])
      for (int e : g.in_edges[v]) bwd[g.edges[e].src] = 1;
  for (int v = 0; v < n; ++v)
    if (!fwd[v] || !bwd[v])
      throw ModelError("vertex '" + g.vertices[v].id +
                       "' is not on any source-to-sink path");
  return g;
}

inline double total_flops(const ModelGraph& g) {
  double sum = 0.0;
  for (const auto& v : g.vertices) sum += v.flops;
  return sum;
}

// Warnings (not errors) for fan-out vertices whose outgoing edges carry
// different feature sizes; the upload cost uses the first edge's size once.
inline std::vector<std::string> fanout_size_warnings(const ModelGraph& g) {
  std::vector<std::string> out;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.out_degree(v) < 2) continue;
    double first = g.output_bytes(v);
    for (int e : g.out_edges[v]) {
      if (g.edges[e].feature_bytes != first) {
        out.push_back("vertex '" + g.vertices[v].id +
                      "': fan-out edges carry different feature sizes; upload "
                      "cost uses the first outgoing edge (" +
                      std::to_string(first) + " bytes)");
        break;
      }
    }
  }
  return out;
}

namespace detail {

inline double parse_number(const std::string& tok, int line, const char* what) {
  const char* s = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || !std::isfinite(v))
    throw ParseError(line, std::string("invalid ") + what + " value '" + tok + "'");
  return v;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

// "key=value" with a required key
inline std::string expect_kv(const std::string& tok, const char* key, int line) {
  std::string prefix = std::string(key) + "=";
  if (tok.rfind(prefix, 0) != 0)
    throw ParseError(line, "expected '" + prefix + "<value>', got '" + tok + "'");
  return tok.substr(prefix.size());
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Model file format (UTF-8, line oriented):
//   model <name>
//   vertex <id> flops=<float> [label=<string>]
//   edge <src> <dst> bytes=<float>
// '#' starts a comment; blank lines are ignored.
inline ModelGraph parse_model(const std::string& text) {
  std::vector<LayerVertex> vertices;
  std::vector<std::tuple<std::string, std::string, double>> edges;
  std::string name;
  bool have_header = false;

  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto toks = detail::split_ws(raw);
    if (toks.empty()) continue;

    if (toks[0] == "model") {
      if (have_header) throw ParseError(line, "duplicate 'model' header");
      if (toks.size() != 2) throw ParseError(line, "expected 'model <name>'");
      name = toks[1];
      have_header = true;
    } else if (toks[0] == "vertex") {
      if (toks.size() < 3 || toks.size() > 4)
        throw ParseError(line, "expected 'vertex <id> flops=<float> [label=<string>]'");
      LayerVertex v;
      v.id = toks[1];
      v.flops = detail::parse_number(detail::expect_kv(toks[2], "flops", line), line, "flops");
      if (v.flops <= 0.0) throw ParseError(line, "flops must be > 0");
      if (toks.size() == 4) v.label = detail::expect_kv(toks[3], "label", line);
      for (const auto& existing : vertices)
        if (existing.id == v.id)
          throw ParseError(line, "duplicate vertex id '" + v.id + "'");
      vertices.push_back(std::move(v));
    } else if (toks[0] == "edge") {
      if (toks.size() != 4)
        throw ParseError(line, "expected 'edge <src> <dst> bytes=<float>'");
      double bytes = detail::parse_number(detail::expect_kv(toks[3], "bytes", line), line, "bytes");
      if (bytes <= 0.0) throw ParseError(line, "bytes must be > 0");
      edges.emplace_back(toks[1], toks[2], bytes);
    } else {
      throw ParseError(line, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!have_header) throw ParseError(line, "missing 'model <name>' header");
  return build_model(std::move(name), std::move(vertices), std::move(edges));
}

// Canonical form: vertices in topological order, edges sorted by endpoint
// indices, %.17g numbers so parse(serialize(g)) reproduces g exactly.
inline std::string serialize_model(const ModelGraph& g) {
  std::string out = "model " + g.name + "\n";
  for (const auto& v : g.vertices) {
    out += "vertex " + v.id + " flops=" + detail::fmt_double(v.flops);
    if (!v.label.empty()) out += " label=" + v.label;
    out += "\n";
  }
  for (const auto& e : g.edges) {
    out += "edge " + g.vertices[e.src].id + " " + g.vertices[e.dst].id +
           " bytes=" + detail::fmt_double(e.feature_bytes) + "\n";
  }
  return out;
}

namespace detail {

struct CatalogSpec {
  const char* name;
  int vertices;
  int edges;
  double total_flops;
};

inline const CatalogSpec* find_catalog(std::string_view name) {
  static constexpr CatalogSpec table[] = {
      {"VGG11", 15, 14, 7.63e9},
      {"ResNet34", 55, 57, 3.68e9},
      {"ResNet50", 73, 75, 4.12e9},
      {"ViT", 26, 32, 3.47e9},
  };
  for (const auto& s : table)
    if (name == s.name) return &s;
  return nullptr;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"VGG11", "ResNet34", "ResNet50", "ViT"};
}

// Synthetic graph matching the published (vertices, edges, GFLOPs) triple
// exactly. Structure is a chain backbone plus evenly spaced length-2 skip
// edges; total FLOPs are split over layers by a seeded log-uniform integer
// partition (largest-remainder rounding keeps the sum exact); feature sizes
// decay geometrically from the raw input size so intermediate features stay
// smaller than the raw data. Same (name, seed) always yields the same graph.
inline ModelGraph catalog_model(const std::string& name, std::uint64_t seed,
                                double raw_input_bytes = 602112.0) {
  const detail::CatalogSpec* spec = detail::find_catalog(name);
  if (!spec)
    throw std::invalid_argument("unknown catalog model '" + name +
                                "' (known: VGG11, ResNet34, ResNet50, ViT)");
  const int n = spec->vertices;
  const int m = spec->edges;

  Rng rng(derive_seed(seed, name));

  // integer FLOP partition: log-uniform weights, largest-remainder rounding
  std::vector<double> weights(n);
  double wsum = 0.0;
  for (auto& w : weights) {
    w = rng.log_uniform(1.0, 100.0);
    wsum += w;
  }
  std::vector<double> flops(n);
  std::vector<std::pair<double, int>> fracs(n);
  double assigned = 0.0;
  for (int i = 0; i < n; ++i) {
    double exact = spec->total_flops * (weights[i] / wsum);
    flops[i] = std::floor(exact);
    fracs[i] = {exact - flops[i], i};
    assigned += flops[i];
  }
  long long leftover = static_cast<long long>(spec->total_flops - assigned);
  std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long long k = 0; k < leftover; ++k) flops[fracs[static_cast<std::size_t>(k)].second] += 1.0;

  // feature sizes: geometric decay from the raw input toward a late-layer
  // floor, with mild jitter kept below 1 so no feature exceeds the raw size
  const double floor_bytes = 32768.0;
  const double decay = std::pow(floor_bytes / raw_input_bytes, 1.0 / (n - 1));
  std::vector<double> out_bytes(n, 0.0);
  for (int v = 0; v + 1 < n; ++v)
    out_bytes[v] = raw_input_bytes * std::pow(decay, v + 1) * rng.uniform(0.8, 1.0);

  std::vector<LayerVertex> vertices(n);
  for (int v = 0; v < n; ++v) {
    vertices[v].id = "v" + std::to_string(v + 1);
    vertices[v].flops = flops[v];
    vertices[v].label = name + ":" + std::to_string(v + 1);
  }

  std::vector<std::tuple<std::string, std::string, double>> edges;
  edges.reserve(m);
  for (int v = 0; v + 1 < n; ++v)
    edges.emplace_back(vertices[v].id, vertices[v + 1].id, out_bytes[v]);
  const int extra = m - (n - 1);
  for (int j = 0; j < extra; ++j) {
    int src = static_cast<int>((static_cast<long long>(j) + 1) * (n - 3) / (extra + 1));
    edges.emplace_back(vertices[src].id, vertices[src + 2].id, out_bytes[src]);
  }

  ModelGraph g = build_model(name, std::move(vertices), std::move(edges));
  if (g.vertex_count() != n || g.edge_count() != m)
    throw std::logic_error("catalog generator produced wrong counts");
  return g;
}

}  // namespace dds
