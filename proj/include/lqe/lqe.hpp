#pragma once

#include "lqe/csv.hpp"
#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/log_quantile.hpp"
#include "lqe/rank_engine.hpp"
#include "lqe/rank_statistics.hpp"
#include "lqe/report_io.hpp"
#include "lqe/sim_config.hpp"
#include "lqe/sim_harness.hpp"
#include "lqe/synthetic_data.hpp"
