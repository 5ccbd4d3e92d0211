#pragma once

#include "equidist/constants.hpp"
#include "equidist/geometry.hpp"
#include "equidist/modular.hpp"
#include "equidist/selection.hpp"
#include "equidist/wiener.hpp"
