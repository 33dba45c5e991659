#include <cmath>

#include "hysid/kernels.hpp"

namespace hysid::kernels {
namespace {

void multiply(std::span<double> dst, std::span<const double> src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
}

void multiply_abs(std::span<double> dst, std::span<const double> src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= std::abs(src[i]);
}

void absolute(std::span<double> dst, std::span<const double> src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::abs(src[i]);
}

void scale(std::span<double> dst, double s) {
    for (double& x : dst) x *= s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void abs_diff(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::abs(a[i] - b[i]);
}

void central_interior(std::span<const double> v, double two_dt, std::span<double> out) {
    const std::size_t n = v.size();
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i + 1] - v[i - 1]) / two_dt;
}

constexpr KernelSet kScalar{
    Isa::Scalar, "scalar", multiply, multiply_abs, absolute,        scale,
    dot,         sum_sq_diff, abs_diff, central_interior,
};

}  // namespace

const KernelSet& scalar_kernels() noexcept { return kScalar; }

}  // namespace hysid::kernels
