// Compiled with -mavx2 -mfma -ffp-contract=off. Elementwise kernels are
// bit-identical to the scalar ones; reductions use four-lane partial sums
// and so differ from the scalar order only by rounding.

#include <immintrin.h>

#include <cmath>

#include "hysid/kernels.hpp"

namespace hysid::kernels {
namespace {

inline __m256d abs_pd(__m256d x) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign_mask, x);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void multiply(std::span<double> dst, std::span<const double> src) {
    const std::size_t n = dst.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst.data() + i);
        __m256d s = _mm256_loadu_pd(src.data() + i);
        _mm256_storeu_pd(dst.data() + i, _mm256_mul_pd(d, s));
    }
    for (; i < n; ++i) dst[i] *= src[i];
}

void multiply_abs(std::span<double> dst, std::span<const double> src) {
    const std::size_t n = dst.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst.data() + i);
        __m256d s = abs_pd(_mm256_loadu_pd(src.data() + i));
        _mm256_storeu_pd(dst.data() + i, _mm256_mul_pd(d, s));
    }
    for (; i < n; ++i) dst[i] *= std::abs(src[i]);
}

void absolute(std::span<double> dst, std::span<const double> src) {
    const std::size_t n = dst.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(dst.data() + i, abs_pd(_mm256_loadu_pd(src.data() + i)));
    }
    for (; i < n; ++i) dst[i] = std::abs(src[i]);
}

void scale(std::span<double> dst, double s) {
    const std::size_t n = dst.size();
    const __m256d factor = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst.data() + i);
        _mm256_storeu_pd(dst.data() + i, _mm256_mul_pd(d, factor));
    }
    for (; i < n; ++i) dst[i] *= s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4),
                               _mm256_loadu_pd(b.data() + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        __m256d d1 =
            _mm256_sub_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void abs_diff(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        _mm256_storeu_pd(out.data() + i, abs_pd(d));
    }
    for (; i < n; ++i) out[i] = std::abs(a[i] - b[i]);
}

void central_interior(std::span<const double> v, double two_dt, std::span<double> out) {
    const std::size_t n = v.size();
    if (n < 3) return;
    const __m256d denom = _mm256_set1_pd(two_dt);
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d ahead = _mm256_loadu_pd(v.data() + i + 1);
        __m256d behind = _mm256_loadu_pd(v.data() + i - 1);
        _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_sub_pd(ahead, behind), denom));
    }
    for (; i + 1 < n; ++i) out[i] = (v[i + 1] - v[i - 1]) / two_dt;
}

constexpr KernelSet kAvx2{
    Isa::Avx2, "avx2", multiply, multiply_abs, absolute,        scale,
    dot,       sum_sq_diff, abs_diff, central_interior,
};

}  // namespace

const KernelSet* avx2_kernels() noexcept { return &kAvx2; }

}  // namespace hysid::kernels
