#pragma once

#include "polyrep/dynamics.hpp"
#include "polyrep/errors.hpp"
#include "polyrep/kernel.hpp"
#include "polyrep/measure.hpp"
#include "polyrep/payoff.hpp"
#include "polyrep/stability.hpp"
#include "polyrep/strategy_space.hpp"
#include "polyrep/types.hpp"
