#pragma once

#include "systemflow/calibration.hpp"
#include "systemflow/classifier.hpp"
#include "systemflow/cli.hpp"
#include "systemflow/conditions.hpp"
#include "systemflow/config.hpp"
#include "systemflow/distribution.hpp"
#include "systemflow/energy.hpp"
#include "systemflow/error.hpp"
#include "systemflow/flow.hpp"
#include "systemflow/functions.hpp"
#include "systemflow/graph.hpp"
#include "systemflow/metrics.hpp"
#include "systemflow/propagate.hpp"
#include "systemflow/random.hpp"
#include "systemflow/report.hpp"
#include "systemflow/scenario.hpp"
#include "systemflow/units.hpp"
