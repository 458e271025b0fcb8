#pragma once

#include "errors.hpp"
#include "numerics.hpp"
#include "states.hpp"
#include "operators.hpp"
#include "phase_space.hpp"
#include "weyl.hpp"
#include "symplectic.hpp"
#include "covariance.hpp"
#include "quantumness.hpp"
#include "tomography.hpp"
#include "io.hpp"
