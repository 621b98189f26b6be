#pragma once

// Umbrella header: numerical solution of Caputo-type fractional initial and
// terminal value problems, explicit continuous-dependence bounds, and the
// perturbation-sweep harness that measures the decay exponents.

#include "fracwell/bounds.hpp"
#include "fracwell/config.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/ivp_solver.hpp"
#include "fracwell/problem.hpp"
#include "fracwell/runner.hpp"
#include "fracwell/special_functions.hpp"
#include "fracwell/sweep.hpp"
#include "fracwell/tvp_solver.hpp"
