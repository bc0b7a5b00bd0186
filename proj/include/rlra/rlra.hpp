#pragma once

#include "errors.hpp"
#include "matrix.hpp"
#include "kernels.hpp"
#include "operator.hpp"
#include "rangefinder.hpp"
#include "fixed_rank.hpp"
#include "fixed_precision.hpp"
#include "single_pass.hpp"
#include "matgen.hpp"
#include "io.hpp"
#include "bench.hpp"
