#pragma once

#include "strichartz/errors.hpp"
#include "strichartz/flows.hpp"
#include "strichartz/hermite.hpp"
#include "strichartz/hessian.hpp"
#include "strichartz/inequality.hpp"
#include "strichartz/integrals.hpp"
#include "strichartz/io.hpp"
#include "strichartz/lambda_table.hpp"
#include "strichartz/linalg.hpp"
#include "strichartz/parallel.hpp"
#include "strichartz/qmho.hpp"
#include "strichartz/quadrature.hpp"
