#pragma once

#include "sflam/error.hpp"
#include "sflam/rng.hpp"
#include "sflam/parallel.hpp"
#include "sflam/scenario.hpp"
#include "sflam/scenario_io.hpp"
#include "sflam/quantizer.hpp"
#include "sflam/cost_model.hpp"
#include "sflam/power_sca.hpp"
#include "sflam/quant_search.hpp"
#include "sflam/rb_matching.hpp"
#include "sflam/bcd_solver.hpp"
#include "sflam/bounds.hpp"
#include "sflam/baselines.hpp"
#include "sflam/toy_trainer.hpp"
#include "sflam/csv.hpp"
#include "sflam/commands.hpp"
