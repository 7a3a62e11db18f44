#pragma once

#include "skewpower/asymptotics.hpp"
#include "skewpower/distribution.hpp"
#include "skewpower/errors.hpp"
#include "skewpower/estimation.hpp"
#include "skewpower/gof.hpp"
#include "skewpower/io.hpp"
#include "skewpower/robustness.hpp"
#include "skewpower/sampling.hpp"
#include "skewpower/scores.hpp"
#include "skewpower/simulation.hpp"
