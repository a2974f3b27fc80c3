#pragma once

#include "lshape/casestudy.hpp"
#include "lshape/closedform.hpp"
#include "lshape/errors.hpp"
#include "lshape/format.hpp"
#include "lshape/geometry.hpp"
#include "lshape/oracle.hpp"
#include "lshape/scenarios.hpp"
#include "lshape/sweep.hpp"
