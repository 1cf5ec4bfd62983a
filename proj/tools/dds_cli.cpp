// Command-line front end: partition a single model, run the multi-device
// simulation, compare methods across fleet sizes, study convergence from
// different initial budgets, emit catalog models, and validate inputs.
//
// Exit codes: 0 ok, 1 input error, 2 non-convergence under --strict.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dds/dds.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("no such model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --model accepts either a file path or "catalog:<NAME>".
std::shared_ptr<const dds::ModelGraph> load_model(const std::string& spec, std::uint64_t seed) {
  const std::string prefix = "catalog:";
  if (spec.rfind(prefix, 0) == 0)
    return std::make_shared<const dds::ModelGraph>(
        dds::catalog_model(spec.substr(prefix.size()), seed));
  return std::make_shared<const dds::ModelGraph>(dds::parse_model(read_file(spec)));
}

std::uint64_t env_seed_fallback(std::uint64_t cli_seed, bool cli_seed_set) {
  if (cli_seed_set) return cli_seed;
  if (const char* env = std::getenv("DDS_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::uint64_t>(v);
    throw std::runtime_error(std::string("invalid DDS_SEED value '") + env + "'");
  }
  return cli_seed;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::runtime_error("empty integer list '" + csv + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::runtime_error("empty list '" + csv + "'");
  return out;
}

void print_strategy(const dds::PartitionStrategy& p, const dds::CostBreakdown& cb,
                    double g_alloc) {
  const dds::ModelGraph& g = *p.model;
  std::printf("model: %s (%d vertices, %d edges, %.17g FLOP)\n", g.name.c_str(),
              g.vertex_count(), g.edge_count(), dds::total_flops(g));
  std::printf("g_alloc: %.17g FLOP/s\n", g_alloc);

  auto join_ids = [&g](const std::vector<int>& vs) {
    std::string s;
    for (int v : vs) s += (s.empty() ? "" : " ") + g.vertices[v].id;
    return s.empty() ? std::string("-") : s;
  };
  std::printf("local  (%zu): %s\n", p.local_set.size(), join_ids(p.local_set).c_str());
  std::printf("server (%zu): %s\n", p.server_set.size(), join_ids(p.server_set).c_str());

  std::string cuts;
  if (p.raw_input_cut) cuts += "raw-input";
  for (int e : p.cut_edges) {
    if (!cuts.empty()) cuts += ", ";
    cuts += g.vertices[g.edges[e].src].id + "->" + g.vertices[g.edges[e].dst].id;
  }
  std::printf("cut edges: %s\n", cuts.empty() ? "-" : cuts.c_str());
  std::printf("T = %.9g s (local %.9g, net %.9g, server %.9g)\n", cb.t_total, cb.t_local,
              cb.t_net, cb.t_server);
}

int cmd_partition(const std::string& model_spec, std::uint64_t seed, double device_gflops,
                  double bandwidth_mbit, double g_alloc_gflops, double alpha_local,
                  double alpha_server, double raw_bytes, double result_bytes, bool dump) {
  auto model = load_model(model_spec, seed);
  for (const auto& w : dds::fanout_size_warnings(*model))
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  dds::DeviceProfile dev;
  dev.id = "cli";
  dev.compute = device_gflops * dds::kFlopPerGflop;
  dev.bandwidth = bandwidth_mbit * dds::kBytesPerMbit;
  dev.alpha_local = alpha_local;
  dev.raw_input_bytes = raw_bytes;
  dev.result_bytes = result_bytes;
  dev.model = model;

  double g_alloc = g_alloc_gflops * dds::kFlopPerGflop;
  auto lg = dds::build_latency_graph(model, dev, g_alloc, alpha_server);
  if (dump) std::fputs(dds::dump_latency_graph(lg).c_str(), stdout);

  auto mc = dds::min_cut(lg);
  dds::ServerProfile srv;
  srv.capacity = std::max(g_alloc, 1.0);
  srv.alpha_server = alpha_server;
  auto cb = dds::inference_cost(mc.strategy, dev, srv, g_alloc, 0.0, 1e-18);
  print_strategy(mc.strategy, cb, g_alloc);
  return 0;
}

dds::ScenarioConfig load_scenario(const std::string& path, std::uint64_t seed,
                                  bool seed_set, int n_override) {
  dds::ScenarioConfig cfg = dds::load_scenario_file(path);
  if (seed_set) cfg.seed = seed;
  if (n_override > 0) cfg.device_count = n_override;
  dds::validate(cfg);
  return cfg;
}

int cmd_simulate(const dds::ScenarioConfig& cfg, const std::string& out_dir, bool strict) {
  dds::RunResult r = dds::run_dds(cfg);
  auto pool = dds::build_pool(cfg);
  auto devices = dds::sample_devices(cfg, pool);

  std::filesystem::create_directories(out_dir);
  dds::write_file(out_dir + "/trace.csv", dds::trace_csv(r, devices));
  std::vector<dds::ComparisonRow> rows = {{r.method, cfg.device_count, r.mean_t,
                                           r.mean_t_server, r.mean_t_net, r.mean_t_local,
                                           r.converged, r.convergence_iteration}};
  dds::write_file(out_dir + "/summary.csv", dds::summary_csv(rows));

  std::printf("%s: N=%d %s in %d rounds, final A=%.6g, mean T=%.6g s\n",
              dds::to_string(r.method), cfg.device_count,
              r.converged ? "converged" : "did NOT converge", r.rounds_run, r.final_price,
              r.mean_t);
  if (!r.converged && strict) return 2;
  return 0;
}

int cmd_compare(const dds::ScenarioConfig& cfg, const std::vector<int>& fleet_sizes,
                const std::string& out_dir) {
  auto rows = dds::compare(cfg, fleet_sizes);
  std::filesystem::create_directories(out_dir);
  dds::write_file(out_dir + "/summary.csv", dds::summary_csv(rows));
  for (const auto& row : rows)
    std::printf("%-4s N=%-4d mean T=%.6g s (server %.6g, net %.6g, local %.6g)\n",
                dds::to_string(row.method), row.n, row.mean_t, row.mean_t_server,
                row.mean_t_net, row.mean_t_local);
  return 0;
}

int cmd_converge(const dds::ScenarioConfig& cfg, const std::vector<double>& a0_list,
                 const std::string& out_dir, bool strict) {
  dds::ConvergenceStudy study = dds::convergence_study(cfg, a0_list);
  std::filesystem::create_directories(out_dir);
  dds::write_file(out_dir + "/converge.csv", dds::converge_csv(study));
  bool all_converged = true;
  for (std::size_t k = 0; k < study.runs.size(); ++k) {
    const auto& r = study.runs[k];
    all_converged = all_converged && r.converged;
    std::printf("a0=%.4g*S: %s in %d rounds, final A=%.6g\n", study.a0_fractions[k],
                r.converged ? "converged" : "did NOT converge", r.rounds_run, r.final_price);
  }
  if (!all_converged && strict) return 2;
  return 0;
}

int cmd_catalog(const std::string& model_spec, std::uint64_t seed) {
  auto model = load_model(model_spec, seed);
  std::fputs(dds::serialize_model(*model).c_str(), stdout);
  return 0;
}

int cmd_validate(const std::string& model_spec, const std::string& scenario_path,
                 std::uint64_t seed) {
  bool ok = true;
  if (!model_spec.empty()) {
    auto model = load_model(model_spec, seed);
    std::printf("model %s: OK (%d vertices, %d edges, %.17g FLOP)\n", model->name.c_str(),
                model->vertex_count(), model->edge_count(), dds::total_flops(*model));
    for (const auto& w : dds::fanout_size_warnings(*model))
      std::printf("warning: %s\n", w.c_str());
  }
  if (!scenario_path.empty()) {
    dds::ScenarioConfig cfg = dds::load_scenario_file(scenario_path);
    auto pool = dds::build_pool(cfg);
    dds::GameConfig game = dds::resolved_game_config(cfg, pool);
    double c_star = 0.0;
    for (const auto& g : pool)
      c_star = std::max(c_star, dds::total_flops(*g) * cfg.alpha_server);
    double S = cfg.server_gflops * dds::kFlopPerGflop;
    bool contraction = dds::contraction_holds(game.gamma, c_star, S);
    std::printf("scenario: OK (N=%d, S=%.17g FLOP/s, gamma=%.17g)\n", cfg.device_count, S,
                game.gamma);
    std::printf("contraction condition (gamma > c*/4S^2): %s (threshold %.17g)\n",
                contraction ? "PASS" : "FAIL", c_star / (4.0 * S * S));
    ok = ok && contraction;
  }
  if (model_spec.empty() && scenario_path.empty())
    throw std::runtime_error("validate needs --model and/or --scenario");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Device/edge DNN partitioning via latency-graph min cuts, with a "
               "decentralized budget game for shared server capacity"};
  app.require_subcommand(1);

  std::string model_spec, scenario_path, out_dir = ".";
  std::uint64_t seed = 0;
  bool strict = false, dump_lg = false;
  int n_override = 0;
  std::string n_list = "5,25,50,100";
  std::string a0_list = "0,0.01,0.05,0.1";
  double device_gflops = 15.0, bandwidth_mbit = 8.0, g_alloc_gflops = 0.0;
  double alpha_local = 1.0, alpha_server = 1.0;
  double raw_bytes = 602112.0, result_bytes = 4096.0;

  auto add_seed = [&](CLI::App* cmd) { return cmd->add_option("--seed", seed, "RNG seed (env DDS_SEED as fallback)"); };

  auto* partition = app.add_subcommand("partition", "optimal placement for one model");
  partition->add_option("--model", model_spec, "model file or catalog:<NAME>")->required();
  auto* pseed = add_seed(partition);
  partition->add_option("--device-gflops", device_gflops, "device compute, GFLOPS");
  partition->add_option("--bandwidth-mbit", bandwidth_mbit, "uplink, Mbit/s");
  partition->add_option("--g-alloc-gflops", g_alloc_gflops, "server allocation, GFLOPS");
  partition->add_option("--alpha-local", alpha_local, "local latency scale");
  partition->add_option("--alpha-server", alpha_server, "server latency scale");
  partition->add_option("--raw-bytes", raw_bytes, "raw input size, bytes");
  partition->add_option("--result-bytes", result_bytes, "inference result size, bytes");
  partition->add_flag("--dump-latency-graph", dump_lg, "print the latency graph arcs");

  auto* simulate = app.add_subcommand("simulate", "run the decentralized game");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* simseed = add_seed(simulate);
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--n", n_override, "override device count");
  simulate->add_flag("--strict", strict, "exit 2 on non-convergence");

  auto* comparec = app.add_subcommand("compare", "all methods across fleet sizes");
  comparec->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* cmpseed = add_seed(comparec);
  comparec->add_option("--out", out_dir, "output directory");
  comparec->add_option("--n", n_list, "comma-separated fleet sizes");

  auto* converge = app.add_subcommand("converge", "price traces from several initial budgets");
  converge->add_option("--scenario", scenario_path, "scenario file")->required();
  auto* cvgseed = add_seed(converge);
  converge->add_option("--out", out_dir, "output directory");
  converge->add_option("--a0", a0_list, "comma-separated initial budgets, fractions of S");
  converge->add_flag("--strict", strict, "exit 2 on non-convergence");

  auto* catalog = app.add_subcommand("catalog", "emit a catalog model file");
  catalog->add_option("--model", model_spec, "catalog:<NAME> or file to re-serialize")->required();
  auto* catseed = add_seed(catalog);

  auto* validate = app.add_subcommand("validate", "check a model file and/or scenario");
  validate->add_option("--model", model_spec, "model file or catalog:<NAME>");
  validate->add_option("--scenario", scenario_path, "scenario file");
  auto* valseed = add_seed(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (partition->parsed())
      return cmd_partition(model_spec, env_seed_fallback(seed, !pseed->empty()), device_gflops,
                           bandwidth_mbit, g_alloc_gflops, alpha_local, alpha_server, raw_bytes,
                           result_bytes, dump_lg);
    if (simulate->parsed())
      return cmd_simulate(load_scenario(scenario_path, env_seed_fallback(seed, !simseed->empty()),
                                        !simseed->empty() || std::getenv("DDS_SEED"), n_override),
                          out_dir, strict);
    if (comparec->parsed())
      return cmd_compare(load_scenario(scenario_path, env_seed_fallback(seed, !cmpseed->empty()),
                                       !cmpseed->empty() || std::getenv("DDS_SEED"), 0),
                         parse_int_list(n_list), out_dir);
    if (converge->parsed())
      return cmd_converge(load_scenario(scenario_path, env_seed_fallback(seed, !cvgseed->empty()),
                                        !cvgseed->empty() || std::getenv("DDS_SEED"), 0),
                          parse_double_list(a0_list), out_dir, strict);
    if (catalog->parsed())
      return cmd_catalog(model_spec, env_seed_fallback(seed, !catseed->empty()));
    if (validate->parsed())
      return cmd_validate(model_spec, scenario_path, env_seed_fallback(seed, !valseed->empty()));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
