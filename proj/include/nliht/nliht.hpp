#pragma once

#include "nliht/analysis.hpp"
#include "nliht/constraints.hpp"
#include "nliht/errors.hpp"
#include "nliht/format.hpp"
#include "nliht/harness.hpp"
#include "nliht/operators.hpp"
#include "nliht/solvers.hpp"
#include "nliht/types.hpp"
