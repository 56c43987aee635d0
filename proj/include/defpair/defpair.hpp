#pragma once

// Umbrella header: definite matrix pairs, weighted subspace angles,
// relative perturbation measures, two-step sin-theta bounds, penalty-family
// sweeps, and Matrix Market / report I/O.

#include "defpair/angles.hpp"
#include "defpair/bounds.hpp"
#include "defpair/core.hpp"
#include "defpair/errors.hpp"
#include "defpair/io.hpp"
#include "defpair/matrix.hpp"
#include "defpair/penalty.hpp"
#include "defpair/perturb.hpp"
