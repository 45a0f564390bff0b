#ifndef FSVI_FSVI_HPP
#define FSVI_FSVI_HPP

#include "fsvi/bound.hpp"
#include "fsvi/error.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/linalg.hpp"
#include "fsvi/model.hpp"
#include "fsvi/scg.hpp"
#include "fsvi/types.hpp"

#include "fsvi/models/attenuation.hpp"
#include "fsvi/models/azzalini.hpp"
#include "fsvi/models/cauchy_ppca.hpp"
#include "fsvi/models/logistic.hpp"
#include "fsvi/models/rbf.hpp"
#include "fsvi/models/softmax.hpp"
#include "fsvi/models/synthetic.hpp"

#include "fsvi/baselines/exact_blr.hpp"
#include "fsvi/baselines/laplace.hpp"
#include "fsvi/baselines/ppca.hpp"

#include "fsvi/eval/kld.hpp"
#include "fsvi/eval/metrics.hpp"
#include "fsvi/eval/predictive.hpp"

#include "fsvi/io/atomic_write.hpp"
#include "fsvi/io/csv.hpp"
#include "fsvi/io/posterior_io.hpp"

#endif  // FSVI_FSVI_HPP
