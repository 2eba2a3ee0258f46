#pragma once

#include "cirs/history.hpp"
#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/operator.hpp"
#include "cirs/linalg/qr.hpp"
#include "cirs/linalg/random.hpp"
#include "cirs/linalg/small_solve.hpp"
#include "cirs/linalg/sparse.hpp"
#include "cirs/smoothing/cirs.hpp"
#include "cirs/smoothing/srs.hpp"
#include "cirs/solvers/block.hpp"
#include "cirs/solvers/common.hpp"
#include "cirs/solvers/global.hpp"
#include "cirs/harness/bounds.hpp"
#include "cirs/harness/experiment.hpp"
#include "cirs/harness/generators.hpp"
#include "cirs/harness/matrix_market.hpp"
#include "cirs/harness/results.hpp"
