#pragma once

#include "nullcollapse/lattice.hpp"
#include "nullcollapse/hilbert.hpp"
#include "nullcollapse/events.hpp"
#include "nullcollapse/model.hpp"
#include "nullcollapse/functionals.hpp"
#include "nullcollapse/environment.hpp"
#include "nullcollapse/sampler.hpp"
#include "nullcollapse/invariance.hpp"
#include "nullcollapse/verify.hpp"
