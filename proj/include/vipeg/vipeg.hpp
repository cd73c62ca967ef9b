#pragma once

#include "vipeg/baselines.hpp"
#include "vipeg/core.hpp"
#include "vipeg/errors.hpp"
#include "vipeg/experiment.hpp"
#include "vipeg/plot.hpp"
#include "vipeg/problems.hpp"
#include "vipeg/prox.hpp"
#include "vipeg/rng.hpp"
#include "vipeg/solvers.hpp"
#include "vipeg/stepsize.hpp"
#include "vipeg/trace_io.hpp"
#include "vipeg/vec.hpp"
