#pragma once

#include "lu25d/error.hpp"
#include "lu25d/matrix.hpp"
#include "lu25d/grid.hpp"
#include "lu25d/fabric.hpp"
#include "lu25d/tournament.hpp"
#include "lu25d/engine.hpp"
#include "lu25d/cost_model.hpp"
#include "lu25d/harness.hpp"
#include "lu25d/report.hpp"
