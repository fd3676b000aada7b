#pragma once

// Umbrella header.

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"
#include "fbgraph/fbm_core.hpp"
#include "fbgraph/fbm_sampler.hpp"
#include "fbgraph/g_analytics.hpp"
#include "fbgraph/moment_lab.hpp"
#include "fbgraph/parallel.hpp"
#include "fbgraph/rng.hpp"
#include "fbgraph/simplex_integrals.hpp"
#include "fbgraph/stats.hpp"
#include "fbgraph/tanh_sinh.hpp"
#include "fbgraph/verification.hpp"
