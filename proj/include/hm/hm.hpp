#pragma once

#include "hm/config.hpp"
#include "hm/diagnostics.hpp"
#include "hm/elliptic.hpp"
#include "hm/errors.hpp"
#include "hm/harness.hpp"
#include "hm/hyperbolic.hpp"
#include "hm/snapshot.hpp"
#include "hm/spectral_grid.hpp"
#include "hm/time_integration.hpp"
