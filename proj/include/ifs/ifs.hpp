#pragma once

#include "ifs/affine.hpp"
#include "ifs/analysis.hpp"
#include "ifs/catalog.hpp"
#include "ifs/error.hpp"
#include "ifs/fibres.hpp"
#include "ifs/measure.hpp"
#include "ifs/point_set.hpp"
#include "ifs/polygon.hpp"
#include "ifs/set_dynamics.hpp"
#include "ifs/system.hpp"
#include "ifs/verify.hpp"
