#pragma once

/// Umbrella header for the efficiency-map uncertainty and sensitivity toolkit.

#include "emuq/artifacts.hpp"
#include "emuq/config.hpp"
#include "emuq/errors.hpp"
#include "emuq/numeric.hpp"
#include "emuq/operating_set.hpp"
#include "emuq/parameter_space.hpp"
#include "emuq/pce.hpp"
#include "emuq/pipeline.hpp"
#include "emuq/pmsm_ecm.hpp"
#include "emuq/qoi.hpp"
#include "emuq/reduction.hpp"
#include "emuq/rng.hpp"
#include "emuq/sampling.hpp"
#include "emuq/sobol_mc.hpp"
