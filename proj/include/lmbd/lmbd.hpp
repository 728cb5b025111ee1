#pragma once

#include "lmbd/asymptotics.hpp"
#include "lmbd/constants.hpp"
#include "lmbd/core.hpp"
#include "lmbd/ensemble.hpp"
#include "lmbd/factorization.hpp"
#include "lmbd/gauss_approx.hpp"
#include "lmbd/optimize.hpp"
#include "lmbd/oracle.hpp"
#include "lmbd/params.hpp"
