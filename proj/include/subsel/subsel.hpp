#pragma once

#include "subsel/barrier.hpp"
#include "subsel/baselines.hpp"
#include "subsel/experiment.hpp"
#include "subsel/generators.hpp"
#include "subsel/linalg.hpp"
#include "subsel/selection.hpp"
