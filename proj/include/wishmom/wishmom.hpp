#pragma once

// Umbrella header.

#include "wishmom/calibration.hpp"
#include "wishmom/covariance.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/index_set.hpp"
#include "wishmom/io.hpp"
#include "wishmom/linalg.hpp"
#include "wishmom/matrix.hpp"
#include "wishmom/moments.hpp"
#include "wishmom/rng.hpp"
#include "wishmom/sampling.hpp"
#include "wishmom/wick.hpp"
