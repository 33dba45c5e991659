#pragma once

// Data-parallel inner loops used by the library builder, the differentiator
// and the metrics. Each kernel has a scalar reference implementation and,
// where the CPU supports it, an AVX2 variant. The active set is chosen once
// at first use; HYSID_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace hysid::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelSet {
    Isa isa;
    std::string_view name;

    /// dst[i] *= src[i]
    void (*multiply)(std::span<double> dst, std::span<const double> src);
    /// dst[i] *= |src[i]|
    void (*multiply_abs)(std::span<double> dst, std::span<const double> src);
    /// dst[i] = |src[i]|
    void (*absolute)(std::span<double> dst, std::span<const double> src);
    /// dst[i] *= s
    void (*scale)(std::span<double> dst, double s);
    /// sum a[i]*b[i]
    double (*dot)(std::span<const double> a, std::span<const double> b);
    /// sum (a[i]-b[i])^2
    double (*sum_sq_diff)(std::span<const double> a, std::span<const double> b);
    /// out[i] = |a[i]-b[i]|
    void (*abs_diff)(std::span<const double> a, std::span<const double> b, std::span<double> out);
    /// out[i] = (v[i+1]-v[i-1]) / two_dt for 1 <= i <= n-2; endpoints untouched.
    void (*central_interior)(std::span<const double> v, double two_dt, std::span<double> out);
};

const KernelSet& scalar_kernels() noexcept;
/// nullptr when the binary was built without AVX2 support.
const KernelSet* avx2_kernels() noexcept;

bool cpu_supports(Isa isa) noexcept;

/// Best kernel set for this CPU, honoring the HYSID_KERNELS override.
const KernelSet& active() noexcept;

}  // namespace hysid::kernels
