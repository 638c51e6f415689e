#pragma once

#include "xfrisk/adoption.hpp"
#include "xfrisk/config.hpp"
#include "xfrisk/csv.hpp"
#include "xfrisk/curves_io.hpp"
#include "xfrisk/error.hpp"
#include "xfrisk/ingestion.hpp"
#include "xfrisk/load_profiles.hpp"
#include "xfrisk/model.hpp"
#include "xfrisk/monte_carlo.hpp"
#include "xfrisk/random.hpp"
#include "xfrisk/scheduler.hpp"
#include "xfrisk/synthetic_feeder.hpp"
#include "xfrisk/thermal.hpp"
#include "xfrisk/time_series.hpp"
