#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "dds/model_graph.hpp"

namespace dds {

// Per-device parameters: E(d) in FLOP/s, b(d) in bytes/s, the local
// regression constant, and the I/O sizes behind the raw-upload and
// result-download arcs.
struct DeviceProfile {
  std::string id;
  double compute = 0.0;    // FLOP/s
  double bandwidth = 0.0;  // bytes/s
  double alpha_local = 1.0;
  double raw_input_bytes = 602112.0;
  double result_bytes = 4096.0;
  std::shared_ptr<const ModelGraph> model;
};

struct ServerProfile {
  double capacity = 0.0;  // FLOP/s, total shared by all devices
  double alpha_server = 1.0;
};

inline void validate(const DeviceProfile& d) {
  if (!(d.compute > 0.0)) throw std::invalid_argument("device compute must be > 0");
  if (!(d.bandwidth > 0.0)) throw std::invalid_argument("device bandwidth must be > 0");
  if (!(d.alpha_local > 0.0)) throw std::invalid_argument("alpha_local must be > 0");
  if (!(d.raw_input_bytes > 0.0)) throw std::invalid_argument("raw_input_bytes must be > 0");
  if (!(d.result_bytes > 0.0)) throw std::invalid_argument("result_bytes must be > 0");
}

inline void validate(const ServerProfile& s) {
  if (!(s.capacity > 0.0)) throw std::invalid_argument("server capacity must be > 0");
  if (!(s.alpha_server > 0.0)) throw std::invalid_argument("alpha_server must be > 0");
}

}  // namespace dds
