#pragma once

#include "errors.hpp"
#include "numerics.hpp"
#include "jet.hpp"
#include "evaluator.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "csv.hpp"
#include "domains.hpp"
#include "domain_json.hpp"
#include "kernels.hpp"
#include "lifting.hpp"
#include "quadrature.hpp"
#include "shadow.hpp"
#include "oracle.hpp"
#include "boundary.hpp"
#include "verify.hpp"
