#pragma once

// Umbrella header: cloning-machine construction, simulation, and verification.

#include "qclone/complex_matrix.hpp"
#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/linalg.hpp"
#include "qclone/machines.hpp"
#include "qclone/metrics.hpp"
#include "qclone/random.hpp"
#include "qclone/serialize.hpp"
#include "qclone/simulate.hpp"
#include "qclone/state_vector.hpp"
#include "qclone/symmetric.hpp"
#include "qclone/verify.hpp"
