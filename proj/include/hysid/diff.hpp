#pragma once

#include <span>
#include <vector>

#include "hysid/core.hpp"

namespace hysid {

/// Second-order finite differences: central in the interior, one-sided
/// three-point stencils at both ends. Output length equals input length.
std::vector<double> central_difference(std::span<const double> values, double dt);

/// du and dw of a validated series.
DerivedSeries differentiate_series(const TimeSeries& ts);

}  // namespace hysid
