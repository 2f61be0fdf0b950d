// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_MFLR_HPP
#define MFLR_MFLR_HPP

// Core library. File formats and the command-line front end live in
// mflr/io.hpp and mflr/cli.hpp, which additionally need the vendored headers.
#include "mflr/bench.hpp"
#include "mflr/cv.hpp"
#include "mflr/errors.hpp"
#include "mflr/features.hpp"
#include "mflr/leastsq.hpp"
#include "mflr/metrics.hpp"
#include "mflr/mf.hpp"
#include "mflr/numerics.hpp"
#include "mflr/pca.hpp"
#include "mflr/random.hpp"
#include "mflr/weighting.hpp"

#endif  // MFLR_MFLR_HPP
