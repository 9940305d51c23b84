#pragma once

#include "dynregret/errors.hpp"
#include "dynregret/rng.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/numerics.hpp"
#include "dynregret/oracles.hpp"
#include "dynregret/newton.hpp"
#include "dynregret/minimize.hpp"
#include "dynregret/learners.hpp"
#include "dynregret/regularity.hpp"
#include "dynregret/scenarios.hpp"
#include "dynregret/config.hpp"
#include "dynregret/harness.hpp"
#include "dynregret/verify.hpp"
#include "dynregret/sweep.hpp"
