#pragma once

#include "satphase/analytics.hpp"
#include "satphase/core.hpp"
#include "satphase/experiments.hpp"
#include "satphase/logspace.hpp"
#include "satphase/model.hpp"
#include "satphase/randgen.hpp"
#include "satphase/rng.hpp"
