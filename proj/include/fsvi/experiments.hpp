#ifndef FSVI_EXPERIMENTS_HPP
#define FSVI_EXPERIMENTS_HPP

#include "fsvi/experiments/attenuation.hpp"
#include "fsvi/experiments/bivariate.hpp"
#include "fsvi/experiments/blr.hpp"
#include "fsvi/experiments/cauchy_ppca.hpp"
#include "fsvi/experiments/classification.hpp"
#include "fsvi/experiments/common.hpp"

#endif  // FSVI_EXPERIMENTS_HPP
