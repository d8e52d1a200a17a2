#pragma once

// Umbrella header for the whole library.

#include "fracnehari/barrier.hpp"
#include "fracnehari/bubbles.hpp"
#include "fracnehari/constants.hpp"
#include "fracnehari/energy.hpp"
#include "fracnehari/fibering.hpp"
#include "fracnehari/grid.hpp"
#include "fracnehari/io.hpp"
#include "fracnehari/moser.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/runconfig.hpp"
#include "fracnehari/runner.hpp"
#include "fracnehari/solver.hpp"
#include "fracnehari/spectral.hpp"
#include "fracnehari/stiffness.hpp"
#include "fracnehari/types.hpp"
