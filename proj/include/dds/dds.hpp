#pragma once

#include "dds/cost.hpp"
#include "dds/game.hpp"
#include "dds/latency_graph.hpp"
#include "dds/max_flow.hpp"
#include "dds/model_graph.hpp"
#include "dds/partition.hpp"
#include "dds/profiles.hpp"
#include "dds/rng.hpp"
#include "dds/sim.hpp"
#include "dds/strategy.hpp"
#include "dds/units.hpp"
