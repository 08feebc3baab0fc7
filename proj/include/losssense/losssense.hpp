#pragma once

#include "losssense/errors.hpp"
#include "losssense/extended.hpp"
#include "losssense/prob_core.hpp"
#include "losssense/scalar_fn.hpp"
#include "losssense/profiles.hpp"
#include "losssense/solvers.hpp"
#include "losssense/functional_spec.hpp"
#include "losssense/functionals.hpp"
#include "losssense/random.hpp"
#include "losssense/axioms.hpp"
#include "losssense/recession.hpp"
#include "losssense/sensitivity.hpp"
#include "losssense/fixtures.hpp"
#include "losssense/io.hpp"
