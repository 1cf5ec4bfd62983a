#pragma once
// The budget game: proportional pricing over a shared capacity, gradient
// descent with momentum on each device's cost, the closed-form best
// response, and the periodic grid re-probe ("resource sniff") used after a
// device has fallen back to fully local execution.

#include <cmath>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dds/cost.hpp"
#include "dds/partition.hpp"

namespace dds {

struct GameConfig {
  double gamma = 0.0;          // charge weight, seconds per (FLOP/s) of budget
  double learning_rate = 0.0;  // eta in the momentum update
  double momentum_decay = 0.9; // rho
  int sniff_period = 10;       // local rounds between grid probes
  int sniff_grid = 16;         // grid points per probe
  int max_iters = 200;
  double convergence_eps = 1e-3;
  int convergence_window = 5;
};

inline void validate(const GameConfig& c) {
  if (!(c.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(c.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(c.momentum_decay >= 0.0 && c.momentum_decay < 1.0))
    throw std::invalid_argument("momentum_decay must be in [0, 1)");
  if (c.sniff_period < 1) throw std::invalid_argument("sniff_period must be >= 1");
  if (c.sniff_grid < 2) throw std::invalid_argument("sniff_grid must be >= 2");
  if (c.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(c.convergence_eps > 0.0)) throw std::invalid_argument("convergence_eps must be > 0");
  if (c.convergence_window < 1) throw std::invalid_argument("convergence_window must be >= 1");
}

// Per-device iteration state. Owned by exactly one device agent.
struct GameState {
  double a = 0.0;        // budget, FLOP/s, clamped to [0, S]
  double momentum = 0.0; // nu
  long iteration = 0;
  int local_mode_rounds = 0;  // rounds spent with a = 0
  std::optional<PartitionStrategy> last_strategy;
};

// The only shared object in the game: budgets keyed by device index, with
// the price scalar A = sum(budgets)/S recomputed on every write. Reads and
// writes are individually atomic with respect to each other.
class PriceBoard {
 public:
  PriceBoard(int device_count, double capacity)
      : budgets_(device_count, 0.0), capacity_(capacity) {
    if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be > 0");
  }

  void set_budget(int device, double a) {
    if (a < 0.0) throw std::invalid_argument("budget must be >= 0");
    std::lock_guard lock(mu_);
    budgets_.at(device) = a;
    double sum = 0.0;  // summed in index order: identical across write histories
    for (double b : budgets_) sum += b;
    price_ = sum / capacity_;
  }

  double budget(int device) const {
    std::lock_guard lock(mu_);
    return budgets_.at(device);
  }

  double price_scalar() const {  // A
    std::lock_guard lock(mu_);
    return price_;
  }

  double capacity() const { return capacity_; }
  int device_count() const { return static_cast<int>(budgets_.size()); }

 private:
  mutable std::mutex mu_;
  std::vector<double> budgets_;
  double capacity_;
  double price_ = 0.0;
};

struct PriceInfo {
  double A = 0.0;
  double unit_price = 1.0;  // max(A, 1)
};

inline PriceInfo price(const PriceBoard& board) {
  double A = board.price_scalar();
  return {A, std::max(A, 1.0)};
}

// Resources actually granted for budget a at price scalar A.
inline double allocate(double a, double A) { return a / std::max(A, 1.0); }

// d cost / d a for the current cut: gamma - c*alpha_s / (max(1,A) * g^2).
// Undefined at a = 0 (the sniff path owns that regime).
inline double gradient(double a, double A, double c_server_flops, double gamma,
                       double alpha_server = 1.0) {
  if (!(a > 0.0))
    throw std::domain_error("gradient undefined at a = 0; use resource_sniff");
  double g = allocate(a, A);
  return gamma - c_server_flops * alpha_server / (std::max(1.0, A) * g * g);
}

// nu <- rho*nu + (1-rho)*grad; a <- clamp(a - eta*nu, 0, S). Hitting 0
// moves the device into local mode (handled by the caller).
inline double momentum_step(GameState& st, double grad, const GameConfig& cfg,
                            double capacity) {
  if (!std::isfinite(grad)) throw std::invalid_argument("non-finite gradient");
  st.momentum = cfg.momentum_decay * st.momentum + (1.0 - cfg.momentum_decay) * grad;
  double a = st.a - cfg.learning_rate * st.momentum;
  st.a = std::min(std::max(a, 0.0), capacity);
  return st.a;
}

// Stationary budget for a fixed cut with server FLOPs c_star at price A.
inline double closed_form_best_response(double c_star, double A, double gamma,
                                        double alpha_server = 1.0) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  return std::sqrt(c_star * alpha_server * std::max(A, 1.0) / gamma);
}

// Sufficient condition for the price map to contract (unique equilibrium):
// gamma > c_star / (4 S^2), with c_star in the same alpha-folded FLOP units
// the gradient uses (i.e. multiplied by alpha_server).
inline bool contraction_holds(double gamma, double c_star, double capacity) {
  return gamma > c_star / (4.0 * capacity * capacity);
}

// Grid probe over log-spaced budgets in [S*1e-4, S]: evaluates the full
// pipeline (latency graph, min cut, cost) at each candidate and returns the
// argmin if it strictly beats staying local, else 0.
inline double resource_sniff(const DeviceProfile& dev, const ServerProfile& srv,
                             double A, const GameConfig& cfg) {
  validate(srv);
  if (!dev.model) throw std::invalid_argument("device has no model");
  double best_a = 0.0;
  double best_cost = inference_cost(all_local(dev.model), dev, srv, 0.0, 0.0, cfg.gamma).cost;
  const double lo = srv.capacity * 1e-4;
  const double hi = srv.capacity;
  for (int j = 0; j < cfg.sniff_grid; ++j) {
    double a = j + 1 == cfg.sniff_grid
                   ? hi
                   : lo * std::pow(hi / lo, static_cast<double>(j) / (cfg.sniff_grid - 1));
    double g = allocate(a, A);
    MinCutResult mc = min_cut(build_latency_graph(dev.model, dev, g, srv.alpha_server));
    double cost = inference_cost(mc.strategy, dev, srv, g, a, cfg.gamma).cost;
    if (cost < best_cost) {
      best_cost = cost;
      best_a = a;
    }
  }
  return best_a;
}

struct DeviceIterationResult {
  GameState state;
  PartitionStrategy strategy;  // placement executed this round
  double a_reported = 0.0;     // budget announced to the board
  double allocation = 0.0;     // g backing the executed placement
};

// One round of the per-device loop:
//   a = 0    -> run locally; every sniff_period-th local round, re-probe the
//               server and re-enter if the probe found a better budget;
//   a > 0    -> allocate, build the latency graph, take the min cut; if the
//               cut keeps everything local, drop to local mode, otherwise
//               take a momentum step along the cost gradient.
inline DeviceIterationResult device_iteration(const DeviceProfile& dev, GameState state,
                                              double A_observed, const ServerProfile& srv,
                                              const GameConfig& cfg) {
  if (!dev.model) throw std::invalid_argument("device has no model");
  state.iteration += 1;

  if (state.a <= 0.0) {
    state.a = 0.0;
    state.local_mode_rounds += 1;
    PartitionStrategy strat = all_local(dev.model);
    if (state.local_mode_rounds % cfg.sniff_period == 0) {
      double candidate = resource_sniff(dev, srv, A_observed, cfg);
      if (candidate > 0.0) {
        state.a = candidate;
        state.momentum = 0.0;
        state.local_mode_rounds = 0;
      }
    }
    state.last_strategy = strat;
    double reported = state.a;
    return {std::move(state), std::move(strat), reported, 0.0};
  }

  double g = allocate(state.a, A_observed);
  MinCutResult mc = min_cut(build_latency_graph(dev.model, dev, g, srv.alpha_server));
  double c = server_flops(mc.strategy, *dev.model);
  state.last_strategy = mc.strategy;

  if (c == 0.0) {
    state.a = 0.0;
    state.momentum = 0.0;
    state.local_mode_rounds = 0;
  } else {
    double grad = gradient(state.a, A_observed, c, cfg.gamma, srv.alpha_server);
    momentum_step(state, grad, cfg, srv.capacity);
    if (state.a == 0.0) {  // clamped into local mode
      state.momentum = 0.0;
      state.local_mode_rounds = 0;
    }
  }
  double reported = state.a;
  return {std::move(state), std::move(mc.strategy), reported, g};
}

}  // namespace dds
