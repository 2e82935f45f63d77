#pragma once

#include "fuzznum/alpha_grid.hpp"
#include "fuzznum/arith.hpp"
#include "fuzznum/derivative.hpp"
#include "fuzznum/error.hpp"
#include "fuzznum/expr.hpp"
#include "fuzznum/fde.hpp"
#include "fuzznum/fuzzy_function.hpp"
#include "fuzznum/fuzzy_number.hpp"
#include "fuzznum/integral.hpp"
#include "fuzznum/json_io.hpp"
#include "fuzznum/quadrature.hpp"
#include "fuzznum/rk4.hpp"
#include "fuzznum/zadeh.hpp"
