#pragma once

// Umbrella header for the generalized matrix-chain compiler library.

#include "gmc/baselines.hpp"
#include "gmc/builtin_registries.hpp"
#include "gmc/chain.hpp"
#include "gmc/codegen.hpp"
#include "gmc/cost.hpp"
#include "gmc/driver.hpp"
#include "gmc/errors.hpp"
#include "gmc/executor.hpp"
#include "gmc/expr.hpp"
#include "gmc/inference.hpp"
#include "gmc/kernel.hpp"
#include "gmc/matrix.hpp"
#include "gmc/operand.hpp"
#include "gmc/parser.hpp"
#include "gmc/property.hpp"
#include "gmc/registry.hpp"
#include "gmc/shape.hpp"
#include "gmc/solver.hpp"
