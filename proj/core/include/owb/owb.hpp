#pragma once

#include "owb/bootstrap.hpp"
#include "owb/core_model.hpp"
#include "owb/diagnostics.hpp"
#include "owb/errors.hpp"
#include "owb/estimator.hpp"
#include "owb/imputer.hpp"
#include "owb/random.hpp"
#include "owb/simulator.hpp"
#include "owb/variance.hpp"
#include "owb/weights.hpp"
