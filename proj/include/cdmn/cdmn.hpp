#ifndef CDMN_CDMN_HPP
#define CDMN_CDMN_HPP

// Umbrella header: the full compile-and-solve pipeline.

#include "cdmn/error.hpp"
#include "cdmn/expr.hpp"
#include "cdmn/fo.hpp"
#include "cdmn/grid.hpp"
#include "cdmn/ground.hpp"
#include "cdmn/report.hpp"
#include "cdmn/solve.hpp"
#include "cdmn/translate.hpp"
#include "cdmn/vocabulary.hpp"

#endif
