#pragma once

// Umbrella header for the sparsekit library: sparsity-exploiting wideband
// spectrum sensing and compressive D2D data gathering, with a deterministic
// Monte Carlo experiment harness.

#include "sparsekit/config.hpp"
#include "sparsekit/csv.hpp"
#include "sparsekit/errors.hpp"
#include "sparsekit/gather.hpp"
#include "sparsekit/ista.hpp"
#include "sparsekit/l0_oracle.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/omp.hpp"
#include "sparsekit/pipeline.hpp"
#include "sparsekit/predict.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/runner.hpp"
#include "sparsekit/sensing.hpp"
#include "sparsekit/signal.hpp"
#include "sparsekit/spectrum.hpp"
