#pragma once

// Umbrella header for the numerical core (no I/O dependencies).

#include "gaussep/core.hpp"
#include "gaussep/phase_space.hpp"
#include "gaussep/matrix_equations.hpp"
#include "gaussep/generators.hpp"
#include "gaussep/spectrum_ep.hpp"
#include "gaussep/gauging.hpp"
#include "gaussep/models.hpp"
