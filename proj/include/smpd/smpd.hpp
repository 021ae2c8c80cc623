#pragma once

#include "smpd/calibration.hpp"
#include "smpd/config.hpp"
#include "smpd/constants.hpp"
#include "smpd/figures_of_merit.hpp"
#include "smpd/flux_tuning.hpp"
#include "smpd/fwm_response.hpp"
#include "smpd/least_squares.hpp"
#include "smpd/optimize.hpp"
#include "smpd/ramsey.hpp"
#include "smpd/random.hpp"
#include "smpd/readout.hpp"
#include "smpd/scenarios.hpp"
#include "smpd/simulator.hpp"
#include "smpd/trace_io.hpp"
#include "smpd/types.hpp"
