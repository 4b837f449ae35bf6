#pragma once

#include "mvd/config.hpp"
#include "mvd/errors.hpp"
#include "mvd/expr.hpp"
#include "mvd/field.hpp"
#include "mvd/grid.hpp"
#include "mvd/harness.hpp"
#include "mvd/model.hpp"
#include "mvd/quadrature.hpp"
#include "mvd/residual.hpp"
#include "mvd/solver.hpp"
