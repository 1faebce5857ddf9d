#pragma once

#include "osmosis/simcore.hpp"
#include "osmosis/traces.hpp"
#include "osmosis/energy.hpp"
#include "osmosis/topology.hpp"
#include "osmosis/flows.hpp"
#include "osmosis/agents.hpp"
#include "osmosis/metrics.hpp"
#include "osmosis/scenario.hpp"
#include "osmosis/simulation.hpp"
