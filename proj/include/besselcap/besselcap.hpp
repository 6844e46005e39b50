#pragma once

#include "besselcap/capacity.hpp"
#include "besselcap/core.hpp"
#include "besselcap/dyadic.hpp"
#include "besselcap/fractal.hpp"
#include "besselcap/gauge.hpp"
#include "besselcap/grid.hpp"
#include "besselcap/hausdorff.hpp"
#include "besselcap/kernels.hpp"
#include "besselcap/laplace_bessel.hpp"
#include "besselcap/maximal_wolff.hpp"
#include "besselcap/measure.hpp"
#include "besselcap/multiindex.hpp"
#include "besselcap/quadrature.hpp"
#include "besselcap/special.hpp"
#include "besselcap/translation.hpp"

namespace besselcap {
inline constexpr const char* kVersion = "0.1.0";
}
