#pragma once

// Umbrella header for the whole simulator.

#include "ommsim/agents.hpp"
#include "ommsim/comms.hpp"
#include "ommsim/config.hpp"
#include "ommsim/engine.hpp"
#include "ommsim/errors.hpp"
#include "ommsim/experiments.hpp"
#include "ommsim/generator.hpp"
#include "ommsim/graph.hpp"
#include "ommsim/graphml.hpp"
#include "ommsim/metrics.hpp"
#include "ommsim/rng.hpp"
#include "ommsim/schedule.hpp"
#include "ommsim/trace.hpp"
#include "ommsim/vehicle.hpp"
