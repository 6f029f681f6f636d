#pragma once

// Umbrella header for the whole library.

#include "bkmodes/bench.hpp"
#include "bkmodes/csv.hpp"
#include "bkmodes/dataset.hpp"
#include "bkmodes/encoded.hpp"
#include "bkmodes/engine.hpp"
#include "bkmodes/init.hpp"
#include "bkmodes/metrics.hpp"
#include "bkmodes/parallel.hpp"
#include "bkmodes/rng.hpp"
#include "bkmodes/synth.hpp"
