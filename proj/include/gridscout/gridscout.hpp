#pragma once

#include "gridscout/bayes.hpp"
#include "gridscout/evidence.hpp"
#include "gridscout/free_energy.hpp"
#include "gridscout/grid.hpp"
#include "gridscout/io.hpp"
#include "gridscout/parallel.hpp"
#include "gridscout/rng.hpp"
#include "gridscout/scenario.hpp"
#include "gridscout/sensor.hpp"
#include "gridscout/sim.hpp"
#include "gridscout/snapshot.hpp"
