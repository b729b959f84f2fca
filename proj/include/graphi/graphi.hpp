#pragma once

#include "graphi/bench.hpp"
#include "graphi/engine.hpp"
#include "graphi/error.hpp"
#include "graphi/graph.hpp"
#include "graphi/graph_json.hpp"
#include "graphi/kernels.hpp"
#include "graphi/modelzoo.hpp"
#include "graphi/profiler.hpp"
#include "graphi/simulator.hpp"
#include "graphi/spsc_ring.hpp"
#include "graphi/tensor.hpp"
#include "graphi/thread_team.hpp"
#include "graphi/trace.hpp"
