#pragma once

#include "netobs/contraction.hpp"
#include "netobs/error.hpp"
#include "netobs/estimation.hpp"
#include "netobs/experiment_spec.hpp"
#include "netobs/experiments.hpp"
#include "netobs/graph.hpp"
#include "netobs/matching.hpp"
#include "netobs/netgen.hpp"
#include "netobs/observability.hpp"
