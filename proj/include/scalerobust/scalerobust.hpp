#pragma once

#include "scalerobust/analytic.hpp"
#include "scalerobust/certify.hpp"
#include "scalerobust/mechanisms.hpp"
#include "scalerobust/oracle.hpp"
#include "scalerobust/paradigms.hpp"
#include "scalerobust/revcurve.hpp"
#include "scalerobust/solver.hpp"
#include "scalerobust/symmetrize.hpp"
