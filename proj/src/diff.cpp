#include "hysid/diff.hpp"

#include "hysid/kernels.hpp"

namespace hysid {

std::vector<double> central_difference(std::span<const double> values, double dt) {
    const std::size_t n = values.size();
    if (n < kMinSamples) {
        throw Error(ErrorCode::TooShort, "differentiation needs at least 4 samples", n);
    }
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt must be positive");

    const double two_dt = 2.0 * dt;
    std::vector<double> out(n);
    kernels::active().central_interior(values, two_dt, out);
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / two_dt;
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / two_dt;
    return out;
}

DerivedSeries differentiate_series(const TimeSeries& ts) {
    const double dt = ts.dt();
    return DerivedSeries{central_difference(ts.u, dt), central_difference(ts.w, dt)};
}

}  // namespace hysid
