// enaqt.hpp: umbrella header

#pragma once

#include "enaqt/analysis.hpp"
#include "enaqt/calibration.hpp"
#include "enaqt/decoherence.hpp"
#include "enaqt/errors.hpp"
#include "enaqt/lattice.hpp"
#include "enaqt/parallel.hpp"
#include "enaqt/propagate.hpp"
#include "enaqt/quadrature.hpp"
#include "enaqt/units.hpp"
#include "enaqt/version.hpp"
