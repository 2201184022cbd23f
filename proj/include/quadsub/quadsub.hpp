#pragma once

#include "quadsub/bargmann.hpp"
#include "quadsub/catalog.hpp"
#include "quadsub/core.hpp"
#include "quadsub/errors.hpp"
#include "quadsub/expm.hpp"
#include "quadsub/fit.hpp"
#include "quadsub/flow.hpp"
#include "quadsub/hermite.hpp"
#include "quadsub/parallel.hpp"
#include "quadsub/report.hpp"
#include "quadsub/singular.hpp"
#include "quadsub/weight.hpp"
