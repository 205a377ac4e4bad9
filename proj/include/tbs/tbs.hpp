#pragma once

#include "tbs/exact_arith.hpp"
#include "tbs/binomial.hpp"
#include "tbs/fermat_quotient.hpp"
#include "tbs/trinomial.hpp"
#include "tbs/records.hpp"
#include "tbs/scan.hpp"
#include "tbs/claims.hpp"
