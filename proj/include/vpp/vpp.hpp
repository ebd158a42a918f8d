#pragma once

#include "vpp/types.hpp"
#include "vpp/rng.hpp"
#include "vpp/linalg.hpp"
#include "vpp/lattice.hpp"
#include "vpp/engine.hpp"
#include "vpp/rates.hpp"
#include "vpp/scheduler.hpp"
#include "vpp/waterfill.hpp"
#include "vpp/sim.hpp"
