#pragma once
// Deterministic multi-device simulation: scenario files, seeded device
// sampling, the asynchronous round loop driving the budget game to an
// approximate equilibrium, the EO/SO/DADS baselines, and CSV emission.
// Inference is virtual throughout: latencies come from the cost model.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dds/game.hpp"
#include "dds/rng.hpp"
#include "dds/units.hpp"

namespace dds {

enum class Schedule { RoundRobin, RandomPermutation };

enum class Method { EO, SO, DADS, DDS };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::EO: return "EO";
    case Method::SO: return "SO";
    case Method::DADS: return "DADS";
    case Method::DDS: return "DDS";
  }
  return "?";
}

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  int device_count = 100;
  double bandwidth_mbit_min = 5.0;   // Mbit/s; 1 Mbit = 125000 bytes
  double bandwidth_mbit_max = 10.0;
  double compute_gflops_min = 10.0;
  double compute_gflops_max = 20.0;
  std::vector<std::string> models = {"VGG11", "ResNet34", "ResNet50", "ViT"};
  double server_gflops = 1200.0;  // S = 1.2 TFLOPS
  double alpha_local = 1.0;
  double alpha_server = 1.0;
  double raw_input_bytes = 602112.0;
  double result_bytes = 4096.0;
  double a0_fraction = 0.01;  // initial budget as a fraction of S; 0 = cold start
  std::uint64_t seed = 1;
  Schedule schedule = Schedule::RandomPermutation;

  // game knobs; gamma/learning_rate of 0 mean "derive the default"
  double gamma = 0.0;
  double learning_rate = 0.0;
  double momentum_decay = 0.9;
  int sniff_period = 10;
  int sniff_grid = 16;
  int max_iters = 200;
  double convergence_eps = 1e-3;
  int convergence_window = 5;
};

inline void validate(const ScenarioConfig& c) {
  if (c.device_count < 1) throw ScenarioError("devices must be >= 1");
  if (!(c.bandwidth_mbit_min > 0.0) || !(c.bandwidth_mbit_max >= c.bandwidth_mbit_min))
    throw ScenarioError("bandwidth range must be positive and ordered");
  if (!(c.compute_gflops_min > 0.0) || !(c.compute_gflops_max >= c.compute_gflops_min))
    throw ScenarioError("compute range must be positive and ordered");
  if (c.models.empty()) throw ScenarioError("models must not be empty");
  for (const auto& m : c.models)
    if (!detail::find_catalog(m)) throw ScenarioError("unknown model '" + m + "' in pool");
  if (!(c.server_gflops > 0.0)) throw ScenarioError("server_gflops must be > 0");
  if (!(c.alpha_local > 0.0) || !(c.alpha_server > 0.0))
    throw ScenarioError("alpha values must be > 0");
  if (!(c.raw_input_bytes > 0.0)) throw ScenarioError("raw_input_bytes must be > 0");
  if (!(c.result_bytes > 0.0)) throw ScenarioError("result_bytes must be > 0");
  if (c.a0_fraction < 0.0 || c.a0_fraction > 1.0)
    throw ScenarioError("a0_fraction must be in [0, 1]");
  if (c.gamma < 0.0) throw ScenarioError("gamma must be >= 0");
  if (c.learning_rate < 0.0) throw ScenarioError("learning_rate must be >= 0");
}

inline ServerProfile server_profile(const ScenarioConfig& c) {
  ServerProfile s;
  s.capacity = c.server_gflops * kFlopPerGflop;
  s.alpha_server = c.alpha_server;
  return s;
}

// One catalog instance per pool entry, shared by every device running it.
inline std::vector<std::shared_ptr<const ModelGraph>> build_pool(const ScenarioConfig& c) {
  std::vector<std::shared_ptr<const ModelGraph>> pool;
  pool.reserve(c.models.size());
  for (std::size_t k = 0; k < c.models.size(); ++k)
    pool.push_back(std::make_shared<const ModelGraph>(
        catalog_model(c.models[k], derive_seed(c.seed, "pool", k), c.raw_input_bytes)));
  return pool;
}

// Default charge weight: twice the contraction-mapping threshold for the
// heaviest model in the pool (alpha-folded), so the sufficient condition
// for a unique equilibrium holds with a 2x margin.
inline double default_gamma(const ScenarioConfig& c,
                            const std::vector<std::shared_ptr<const ModelGraph>>& pool) {
  double c_max = 0.0;
  for (const auto& g : pool) c_max = std::max(c_max, total_flops(*g));
  double S = c.server_gflops * kFlopPerGflop;
  return 2.0 * (c_max * c.alpha_server) / (4.0 * S * S);
}

inline GameConfig resolved_game_config(const ScenarioConfig& c,
                                       const std::vector<std::shared_ptr<const ModelGraph>>& pool) {
  GameConfig g;
  g.gamma = c.gamma > 0.0 ? c.gamma : default_gamma(c, pool);
  double S = c.server_gflops * kFlopPerGflop;
  // default step size: a pure-charge gradient (grad = gamma) moves the
  // budget by 5% of the server capacity per round
  g.learning_rate = c.learning_rate > 0.0 ? c.learning_rate : 0.05 * S / g.gamma;
  g.momentum_decay = c.momentum_decay;
  g.sniff_period = c.sniff_period;
  g.sniff_grid = c.sniff_grid;
  g.max_iters = c.max_iters;
  g.convergence_eps = c.convergence_eps;
  g.convergence_window = c.convergence_window;
  validate(g);
  return g;
}

// Device i draws from its own seed stream, so profiles are identical across
// methods and across fleet sizes sharing a seed (paired comparisons).
inline std::vector<DeviceProfile> sample_devices(
    const ScenarioConfig& c, const std::vector<std::shared_ptr<const ModelGraph>>& pool) {
  std::vector<DeviceProfile> devices;
  devices.reserve(c.device_count);
  for (int i = 0; i < c.device_count; ++i) {
    Rng rng(derive_seed(c.seed, "device", static_cast<std::uint64_t>(i)));
    DeviceProfile d;
    char buf[16];
    std::snprintf(buf, sizeof buf, "d%03d", i);
    d.id = buf;
    d.bandwidth = rng.uniform(c.bandwidth_mbit_min, c.bandwidth_mbit_max) * kBytesPerMbit;
    d.compute = rng.uniform(c.compute_gflops_min, c.compute_gflops_max) * kFlopPerGflop;
    d.alpha_local = c.alpha_local;
    d.raw_input_bytes = c.raw_input_bytes;
    d.result_bytes = c.result_bytes;
    d.model = pool[rng.below(pool.size())];
    devices.push_back(std::move(d));
  }
  return devices;
}

struct TraceRow {
  int iteration = 0;     // 1-based round
  int device = 0;        // index into the device list
  double a = 0.0;        // budget announced at the end of the turn
  double g = 0.0;        // allocation backing the executed placement
  double A = 0.0;        // price scalar observed at the start of the turn
  double t_total = 0.0;  // latency of the executed placement
  double cost = 0.0;     // t_total + gamma * (budget in force this round)
};

struct DeviceOutcome {
  std::string id;
  double a = 0.0;
  double g = 0.0;
  PartitionStrategy strategy;
  CostBreakdown cost;
};

struct RunResult {
  Method method = Method::DDS;
  std::vector<double> price_series;  // board A at the end of each round
  std::vector<TraceRow> trace;
  std::vector<DeviceOutcome> finals;
  bool converged = false;
  int convergence_iteration = 0;  // first round of the stable price plateau; 0 for baselines
  int rounds_run = 0;             // includes the stability window after the plateau began
  double final_price = 0.0;  // A at the end of the run
  double mean_t = 0.0, mean_t_local = 0.0, mean_t_net = 0.0, mean_t_server = 0.0;
};

namespace detail {

inline void fill_aggregates(RunResult& r) {
  double t = 0, tl = 0, tn = 0, ts = 0;
  for (const auto& d : r.finals) {
    t += d.cost.t_total;
    tl += d.cost.t_local;
    tn += d.cost.t_net;
    ts += d.cost.t_server;
  }
  double n = static_cast<double>(r.finals.size());
  r.mean_t = t / n;
  r.mean_t_local = tl / n;
  r.mean_t_net = tn / n;
  r.mean_t_server = ts / n;
}

inline bool window_stable(const std::vector<double>& series, int window, double eps) {
  int t = static_cast<int>(series.size());
  if (t < window + 1) return false;
  double now = series[t - 1];
  double scale = std::max(std::abs(now), 1.0);
  for (int j = 1; j <= window; ++j)
    if (std::abs(now - series[t - 1 - j]) >= eps * scale) return false;
  return true;
}

}  // namespace detail

// The decentralized run: each round, devices take their turn in schedule
// order; the board's A refreshes after every report, so later devices in a
// round observe the effect of earlier ones (asynchronous semantics).
// Non-convergence within max_iters is a reported outcome, not an error.
inline RunResult run_dds(const ScenarioConfig& cfg) {
  validate(cfg);
  auto pool = build_pool(cfg);
  auto devices = sample_devices(cfg, pool);
  ServerProfile srv = server_profile(cfg);
  GameConfig game = resolved_game_config(cfg, pool);
  const int n = cfg.device_count;

  PriceBoard board(n, srv.capacity);
  std::vector<GameState> states(n);
  for (int i = 0; i < n; ++i) {
    states[i].a = cfg.a0_fraction * srv.capacity;
    if (states[i].a <= 0.0) {
      // cold start: stagger the first probes so devices explore the server
      // one after another instead of in lockstep every sniff_period rounds
      states[i].local_mode_rounds = game.sniff_period - 1 - (i % game.sniff_period);
    }
    board.set_budget(i, states[i].a);
  }

  Rng schedule_rng(derive_seed(cfg.seed, "schedule"));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  RunResult r;
  r.method = Method::DDS;
  // the stop window must span a full sniff cycle: a price is only settled
  // once every local-mode device has re-probed it and declined
  const int stop_window = std::max(game.convergence_window, game.sniff_period + 1);
  for (int round = 1; round <= game.max_iters; ++round) {
    if (cfg.schedule == Schedule::RandomPermutation) schedule_rng.shuffle(order);
    for (int idx : order) {
      double a_before = states[idx].a;
      double A_obs = board.price_scalar();
      DeviceIterationResult step = device_iteration(devices[idx], states[idx], A_obs, srv, game);
      states[idx] = std::move(step.state);
      board.set_budget(idx, step.a_reported);
      CostBreakdown cb = inference_cost(step.strategy, devices[idx], srv, step.allocation,
                                        a_before, game.gamma);
      r.trace.push_back({round, idx, step.a_reported, step.allocation, A_obs,
                         cb.t_total, cb.cost});
    }
    r.price_series.push_back(board.price_scalar());
    r.rounds_run = round;
    if (detail::window_stable(r.price_series, stop_window, game.convergence_eps)) {
      r.converged = true;
      r.convergence_iteration = std::max(1, round - stop_window);
      break;
    }
  }
  r.final_price = board.price_scalar();

  // consistent final snapshot: every device re-partitioned at the final price
  for (int i = 0; i < n; ++i) {
    DeviceOutcome out;
    out.id = devices[i].id;
    out.a = states[i].a;
    out.g = allocate(out.a, r.final_price);
    if (out.a > 0.0) {
      MinCutResult mc =
          min_cut(build_latency_graph(devices[i].model, devices[i], out.g, srv.alpha_server));
      out.strategy = std::move(mc.strategy);
    } else {
      out.strategy = all_local(devices[i].model);
    }
    out.cost = inference_cost(out.strategy, devices[i], srv, out.g, out.a, game.gamma);
    r.finals.push_back(std::move(out));
  }
  detail::fill_aggregates(r);
  return r;
}

// Baselines share the device sampling with run_dds under the same seed.
// EO runs everything on the device; SO ships the raw input and runs
// everything on the server at g = S/N; DADS takes the min cut at a fixed
// g = S/N with no game iterations.
inline RunResult run_baseline(const ScenarioConfig& cfg, Method method) {
  if (method == Method::DDS) return run_dds(cfg);
  validate(cfg);
  auto pool = build_pool(cfg);
  auto devices = sample_devices(cfg, pool);
  ServerProfile srv = server_profile(cfg);
  GameConfig game = resolved_game_config(cfg, pool);
  const double share = srv.capacity / cfg.device_count;

  RunResult r;
  r.method = method;
  r.converged = true;
  for (const auto& dev : devices) {
    DeviceOutcome out;
    out.id = dev.id;
    switch (method) {
      case Method::EO:
        out.strategy = all_local(dev.model);
        out.g = 0.0;
        break;
      case Method::SO:
        out.strategy = all_server(dev.model);
        out.g = share;
        break;
      case Method::DADS: {
        out.g = share;
        MinCutResult mc =
            min_cut(build_latency_graph(dev.model, dev, out.g, srv.alpha_server));
        out.strategy = std::move(mc.strategy);
        break;
      }
      case Method::DDS:
        break;
    }
    out.a = 0.0;  // baselines pay no budget
    out.cost = inference_cost(out.strategy, dev, srv, out.g, out.a, game.gamma);
    r.finals.push_back(std::move(out));
  }
  detail::fill_aggregates(r);
  return r;
}

struct ComparisonRow {
  Method method = Method::EO;
  int n = 0;
  double mean_t = 0.0, mean_t_server = 0.0, mean_t_net = 0.0, mean_t_local = 0.0;
  bool converged = false;
  int iters = 0;
};

// All four methods at each fleet size, with shared seeds (device i has the
// same profile in every cell of the table).
inline std::vector<ComparisonRow> compare(const ScenarioConfig& cfg,
                                          const std::vector<int>& fleet_sizes) {
  std::vector<ComparisonRow> rows;
  for (int n : fleet_sizes) {
    ScenarioConfig c = cfg;
    c.device_count = n;
    for (Method m : {Method::EO, Method::SO, Method::DADS, Method::DDS}) {
      RunResult r = run_baseline(c, m);
      rows.push_back({m, n, r.mean_t, r.mean_t_server, r.mean_t_net, r.mean_t_local,
                      r.converged, r.convergence_iteration});
    }
  }
  return rows;
}

// Price trajectory as perceived by one device: the A it observed at the
// start of each of its turns.
inline std::vector<double> tracked_price_trace(const RunResult& r, int device = 0) {
  std::vector<double> out;
  for (const auto& row : r.trace)
    if (row.device == device) out.push_back(row.A);
  return out;
}

struct ConvergenceStudy {
  std::vector<double> a0_fractions;
  std::vector<RunResult> runs;                 // one per a0, identical seeds
  std::vector<std::vector<double>> traces;     // tracked device's A per round
};

inline ConvergenceStudy convergence_study(const ScenarioConfig& cfg,
                                          const std::vector<double>& a0_fractions) {
  ConvergenceStudy study;
  study.a0_fractions = a0_fractions;
  for (double a0 : a0_fractions) {
    ScenarioConfig c = cfg;
    c.a0_fraction = a0;
    RunResult r = run_dds(c);
    study.traces.push_back(tracked_price_trace(r, 0));
    study.runs.push_back(std::move(r));
  }
  return study;
}

// ---- CSV emission (deterministic: %.17g, fixed row order) ----

namespace detail {

inline std::string csv_num(double v) { return fmt_double(v); }

}  // namespace detail

inline std::string trace_csv(const RunResult& r, const std::vector<DeviceProfile>& devices) {
  std::string out = "iteration,device_id,a,g,A,T,L\n";
  for (const auto& row : r.trace) {
    out += std::to_string(row.iteration) + "," + devices[row.device].id + "," +
           detail::csv_num(row.a) + "," + detail::csv_num(row.g) + "," +
           detail::csv_num(row.A) + "," + detail::csv_num(row.t_total) + "," +
           detail::csv_num(row.cost) + "\n";
  }
  return out;
}

inline std::string summary_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "method,N,mean_T,mean_Ts,mean_Tt,mean_Tl,converged,iters\n";
  for (const auto& row : rows) {
    out += std::string(to_string(row.method)) + "," + std::to_string(row.n) + "," +
           detail::csv_num(row.mean_t) + "," + detail::csv_num(row.mean_t_server) + "," +
           detail::csv_num(row.mean_t_net) + "," + detail::csv_num(row.mean_t_local) + "," +
           (row.converged ? "1" : "0") + "," + std::to_string(row.iters) + "\n";
  }
  return out;
}

inline std::string converge_csv(const ConvergenceStudy& study) {
  std::string out = "a0_fraction,iteration,A\n";
  for (std::size_t k = 0; k < study.traces.size(); ++k)
    for (std::size_t t = 0; t < study.traces[k].size(); ++t)
      out += detail::csv_num(study.a0_fractions[k]) + "," + std::to_string(t + 1) + "," +
             detail::csv_num(study.traces[k][t]) + "\n";
  return out;
}

// ---- scenario files: flat key=value text, '#' comments ----

inline Schedule parse_schedule(const std::string& v) {
  if (v == "round_robin") return Schedule::RoundRobin;
  if (v == "random_permutation") return Schedule::RandomPermutation;
  throw ScenarioError("schedule must be 'round_robin' or 'random_permutation', got '" + v + "'");
}

inline ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto eq = raw.find('=');
    std::string stripped = raw;
    stripped.erase(std::remove_if(stripped.begin(), stripped.end(),
                                  [](unsigned char c) { return std::isspace(c); }),
                   stripped.end());
    if (stripped.empty()) continue;
    if (eq == std::string::npos)
      throw ScenarioError("line " + std::to_string(line) + ": expected key = value");

    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(raw.substr(0, eq));
    std::string value = trim(raw.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ScenarioError("line " + std::to_string(line) + ": expected key = value");

    auto num = [&](const char* what) {
      char* end = nullptr;
      double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        throw ScenarioError("key '" + key + "': invalid " + what + " '" + value + "'");
      return v;
    };
    auto integer = [&]() {
      double v = num("integer");
      if (v != std::floor(v)) throw ScenarioError("key '" + key + "': expected an integer");
      return static_cast<long long>(v);
    };
    auto seed_value = [&]() {  // full 64-bit range, no double round-trip
      char* end = nullptr;
      unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0')
        throw ScenarioError("key '" + key + "': invalid seed '" + value + "'");
      return static_cast<std::uint64_t>(v);
    };

    if (key == "devices") cfg.device_count = static_cast<int>(integer());
    else if (key == "seed") cfg.seed = seed_value();
    else if (key == "bandwidth_mbit_min") cfg.bandwidth_mbit_min = num("number");
    else if (key == "bandwidth_mbit_max") cfg.bandwidth_mbit_max = num("number");
    else if (key == "compute_gflops_min") cfg.compute_gflops_min = num("number");
    else if (key == "compute_gflops_max") cfg.compute_gflops_max = num("number");
    else if (key == "server_gflops") cfg.server_gflops = num("number");
    else if (key == "alpha_local") cfg.alpha_local = num("number");
    else if (key == "alpha_server") cfg.alpha_server = num("number");
    else if (key == "raw_input_bytes") cfg.raw_input_bytes = num("number");
    else if (key == "result_bytes") cfg.result_bytes = num("number");
    else if (key == "a0_fraction") cfg.a0_fraction = num("number");
    else if (key == "gamma") cfg.gamma = num("number");
    else if (key == "learning_rate") cfg.learning_rate = num("number");
    else if (key == "momentum_decay") cfg.momentum_decay = num("number");
    else if (key == "sniff_period") cfg.sniff_period = static_cast<int>(integer());
    else if (key == "sniff_grid") cfg.sniff_grid = static_cast<int>(integer());
    else if (key == "max_iters") cfg.max_iters = static_cast<int>(integer());
    else if (key == "convergence_eps") cfg.convergence_eps = num("number");
    else if (key == "convergence_window") cfg.convergence_window = static_cast<int>(integer());
    else if (key == "schedule") cfg.schedule = parse_schedule(value);
    else if (key == "models") {
      cfg.models.clear();
      std::istringstream ms(value);
      std::string name;
      while (std::getline(ms, name, ',')) {
        name = trim(name);
        if (!name.empty()) cfg.models.push_back(name);
      }
    } else {
      throw ScenarioError("unknown scenario key '" + key + "' (line " +
                          std::to_string(line) + ")");
    }
  }
  validate(cfg);
  return cfg;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing file '" + path + "'");
}

}  // namespace dds
