#pragma once

#include "metacorr/ci.hpp"
#include "metacorr/datasets.hpp"
#include "metacorr/pooling.hpp"
#include "metacorr/rng.hpp"
#include "metacorr/simulate.hpp"
#include "metacorr/special.hpp"
#include "metacorr/stats.hpp"
