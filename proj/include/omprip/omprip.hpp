#pragma once

#include "omprip/combinations.hpp"
#include "omprip/csv.hpp"
#include "omprip/ensembles.hpp"
#include "omprip/error.hpp"
#include "omprip/experiments.hpp"
#include "omprip/linalg.hpp"
#include "omprip/omp.hpp"
#include "omprip/random.hpp"
#include "omprip/ric.hpp"
#include "omprip/sharpness.hpp"
