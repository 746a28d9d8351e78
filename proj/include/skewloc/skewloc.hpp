#pragma once

#include "skewloc/errors.hpp"
#include "skewloc/process.hpp"
#include "skewloc/quadrature.hpp"
#include "skewloc/kernel.hpp"
#include "skewloc/analytic.hpp"
#include "skewloc/tabulation.hpp"
#include "skewloc/asymptotics.hpp"
#include "skewloc/rng.hpp"
#include "skewloc/sampler.hpp"
#include "skewloc/statistics.hpp"
#include "skewloc/mc.hpp"
#include "skewloc/io.hpp"
