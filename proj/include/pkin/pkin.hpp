#pragma once

#include "pkin/angles.hpp"
#include "pkin/backbone3d.hpp"
#include "pkin/config.hpp"
#include "pkin/distributions.hpp"
#include "pkin/errors.hpp"
#include "pkin/experiments.hpp"
#include "pkin/pk.hpp"
#include "pkin/report_io.hpp"
#include "pkin/sampler.hpp"
#include "pkin/special_functions.hpp"
#include "pkin/stats.hpp"
#include "pkin/walk2d.hpp"
