#pragma once

// Everything except the command-line layer.

#include "circform/agent.hpp"
#include "circform/bounds.hpp"
#include "circform/config.hpp"
#include "circform/error.hpp"
#include "circform/interval.hpp"
#include "circform/io.hpp"
#include "circform/kinematics.hpp"
#include "circform/monte_carlo.hpp"
#include "circform/rng.hpp"
#include "circform/run.hpp"
#include "circform/sensing.hpp"
#include "circform/sim.hpp"
#include "circform/verify.hpp"
