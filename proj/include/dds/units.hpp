#pragma once

namespace dds {

// One coherent unit system throughout: FLOPs in FLOP, compute in FLOP/s,
// sizes in bytes, bandwidth in bytes/s, latencies in seconds.
inline constexpr double kBytesPerMbit = 125000.0;
inline constexpr double kFlopPerGflop = 1e9;

// Capacity sentinel for arcs that must never be cut. Far above any finite
// latency sum in scope; asserted to never appear in a returned min cut.
inline constexpr double kInfiniteSeconds = 1e18;

}  // namespace dds
