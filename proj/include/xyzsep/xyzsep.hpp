#pragma once

#include "xyzsep/common.hpp"
#include "xyzsep/factorization.hpp"
#include "xyzsep/hilbert.hpp"
#include "xyzsep/lattice.hpp"
#include "xyzsep/model_io.hpp"
#include "xyzsep/observables.hpp"
#include "xyzsep/spectrum.hpp"
#include "xyzsep/sweep.hpp"
