#pragma once

#include "equidist/modular/correlation.hpp"
#include "equidist/modular/eisenstein.hpp"
#include "equidist/modular/fit.hpp"
#include "equidist/modular/integral_estimate.hpp"
#include "equidist/modular/upper_half.hpp"
#include "equidist/modular/windowed.hpp"
