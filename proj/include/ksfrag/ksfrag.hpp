#pragma once

// Umbrella header for the numerical library. The experiment layer
// (ksfrag/experiment/*) additionally needs the vendored json.hpp.

#include "ksfrag/errors.hpp"
#include "ksfrag/fock.hpp"
#include "ksfrag/fragmentation.hpp"
#include "ksfrag/operator.hpp"
#include "ksfrag/schrieffer_wolff.hpp"
#include "ksfrag/spectral.hpp"
#include "ksfrag/su2_matter.hpp"
#include "ksfrag/u1_ladder.hpp"
