#pragma once

#include "twintrack/analysis.hpp"
#include "twintrack/baseline.hpp"
#include "twintrack/config.hpp"
#include "twintrack/controller.hpp"
#include "twintrack/drivetrain.hpp"
#include "twintrack/errors.hpp"
#include "twintrack/params.hpp"
#include "twintrack/plot.hpp"
#include "twintrack/scenario.hpp"
#include "twintrack/tire.hpp"
#include "twintrack/trace.hpp"
#include "twintrack/transform.hpp"
#include "twintrack/vehicle.hpp"
