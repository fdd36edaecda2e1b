#pragma once

#include "postproj/analytic.hpp"
#include "postproj/constraint_set.hpp"
#include "postproj/diagnostics.hpp"
#include "postproj/errors.hpp"
#include "postproj/experiments.hpp"
#include "postproj/io.hpp"
#include "postproj/linalg.hpp"
#include "postproj/normal.hpp"
#include "postproj/parallel.hpp"
#include "postproj/projection.hpp"
#include "postproj/qp.hpp"
#include "postproj/samplers.hpp"
#include "postproj/stiefel.hpp"
