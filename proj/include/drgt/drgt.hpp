#pragma once

// Umbrella header for the equilibrium engine.

#include "drgt/dro.hpp"
#include "drgt/errors.hpp"
#include "drgt/fixtures.hpp"
#include "drgt/game.hpp"
#include "drgt/multilinear.hpp"
#include "drgt/parametric.hpp"
#include "drgt/polyhedron.hpp"
#include "drgt/risk.hpp"
#include "drgt/robust.hpp"
#include "drgt/solver.hpp"
