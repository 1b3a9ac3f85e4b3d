#pragma once

#include "nomaec/channel.hpp"
#include "nomaec/closed_form.hpp"
#include "nomaec/errors.hpp"
#include "nomaec/harness.hpp"
#include "nomaec/monte_carlo.hpp"
#include "nomaec/rate_model.hpp"
#include "nomaec/rng.hpp"
#include "nomaec/specfun.hpp"
