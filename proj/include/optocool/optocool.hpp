// optocool.hpp: Umbrella header for the cooling simulation library

#pragma once

#include "optocool/error.hpp"
#include "optocool/format.hpp"
#include "optocool/params.hpp"
#include "optocool/steady_state.hpp"
#include "optocool/spectrum.hpp"
#include "optocool/cooling.hpp"
#include "optocool/sweep.hpp"
