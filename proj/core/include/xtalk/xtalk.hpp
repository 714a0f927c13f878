#pragma once

#include "xtalk/calibrate.hpp"
#include "xtalk/config.hpp"
#include "xtalk/dynamics.hpp"
#include "xtalk/hilbert.hpp"
#include "xtalk/metrics.hpp"
#include "xtalk/nelder_mead.hpp"
#include "xtalk/output.hpp"
#include "xtalk/perturb.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/quadrature.hpp"
#include "xtalk/sweeps.hpp"
