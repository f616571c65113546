#pragma once

// Umbrella header for the xi rank-correlation toolkit.

#include "xicor/csv.hpp"
#include "xicor/error.hpp"
#include "xicor/inference.hpp"
#include "xicor/oracle.hpp"
#include "xicor/random.hpp"
#include "xicor/ranks.hpp"
#include "xicor/sample.hpp"
#include "xicor/sims.hpp"
#include "xicor/xi.hpp"
