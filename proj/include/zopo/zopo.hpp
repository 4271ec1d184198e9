#pragma once

#include "zopo/core/error.hpp"
#include "zopo/core/numerics.hpp"
#include "zopo/core/parallel.hpp"
#include "zopo/core/random.hpp"
#include "zopo/core/types.hpp"

#include "zopo/algorithms.hpp"
#include "zopo/analysis.hpp"
#include "zopo/bench.hpp"
#include "zopo/commands.hpp"
#include "zopo/estimator.hpp"
#include "zopo/experiments.hpp"
#include "zopo/io.hpp"
#include "zopo/oracles.hpp"
