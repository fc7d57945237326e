#pragma once

#include "beamsm/baselines.hpp"
#include "beamsm/config.hpp"
#include "beamsm/csv.hpp"
#include "beamsm/errors.hpp"
#include "beamsm/harness.hpp"
#include "beamsm/jio_sm_rls.hpp"
#include "beamsm/linalg.hpp"
#include "beamsm/signal_model.hpp"
#include "beamsm/sm_bound.hpp"
