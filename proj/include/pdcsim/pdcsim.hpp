#pragma once

// Umbrella header for the two-resonator parametric down-conversion
// simulator: circuit constants, SQUID-loaded mode solver, pump/Kerr coupling
// constants, moment-equation dynamics, closed-form steady state, and the
// configuration/serialization plumbing shared with the CLI.

#include <pdcsim/constants.hpp>
#include <pdcsim/errors.hpp>
#include <pdcsim/circuit.hpp>
#include <pdcsim/mode_solver.hpp>
#include <pdcsim/coupling.hpp>
#include <pdcsim/drive.hpp>
#include <pdcsim/steady_state.hpp>
#include <pdcsim/langevin.hpp>
#include <pdcsim/config.hpp>
#include <pdcsim/io.hpp>
#include <pdcsim/parallel.hpp>
