#include "geowalk/simd/kernels.hpp"

#if defined(GEOWALK_HAVE_AVX2)

#include <immintrin.h>

namespace geowalk::simd {

namespace {

void sq_distances_avx2(const double* soa, std::size_t stride, std::size_t n, int dim, const double* q,
                       double* out) {
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        __m256d t = _mm256_sub_pd(_mm256_loadu_pd(soa + j), _mm256_set1_pd(q[0]));
        __m256d acc = _mm256_mul_pd(t, t);
        for (int k = 1; k < dim; ++k) {
            t = _mm256_sub_pd(_mm256_loadu_pd(soa + static_cast<std::size_t>(k) * stride + j), _mm256_set1_pd(q[k]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(t, t));
        }
        _mm256_storeu_pd(out + j, acc);
    }
    for (std::size_t j = n4; j < n; ++j) {
        double t = soa[j] - q[0];
        double acc = t * t;
        for (int k = 1; k < dim; ++k) {
            t = soa[static_cast<std::size_t>(k) * stride + j] - q[k];
            acc = acc + t * t;
        }
        out[j] = acc;
    }
}

inline double reduce_lanes(__m256d v, const double* tail, std::size_t n_tail) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    for (std::size_t i = 0; i < n_tail; ++i) lane[i] += tail[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double tail[3];
    for (std::size_t i = n4; i < n; ++i) tail[i - n4] = a[i] * b[i];
    return reduce_lanes(acc, tail, n - n4);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d va = _mm256_set1_pd(a);
    for (std::size_t i = 0; i < n4; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (std::size_t i = n4; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpby_avx2(const double* x, double b, double* y, std::size_t n) {
    const std::size_t n4 = n & ~std::size_t{3};
    const __m256d vb = _mm256_set1_pd(b);
    for (std::size_t i = 0; i < n4; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))));
    for (std::size_t i = n4; i < n; ++i) y[i] = x[i] + b * y[i];
}

void csr_matvec_avx2(const std::uint32_t* row_ptr, const std::uint32_t* cols, const double* vals, const double* x,
                     double* y, std::size_t n_rows) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::uint32_t begin = row_ptr[r];
        const std::uint32_t len = row_ptr[r + 1] - begin;
        const std::uint32_t len4 = len & ~3u;
        __m256d acc = _mm256_setzero_pd();
        for (std::uint32_t p = 0; p < len4; p += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + begin + p));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(vals + begin + p), xv));
        }
        double tail[3];
        for (std::uint32_t p = len4; p < len; ++p) tail[p - len4] = vals[begin + p] * x[cols[begin + p]];
        y[r] = reduce_lanes(acc, tail, len - len4);
    }
}

const KernelTable kAvx2 = {Isa::Avx2, "avx2", sq_distances_avx2, dot_avx2, axpy_avx2, xpby_avx2, csr_matvec_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table_if_built() { return &kAvx2; }
}  // namespace detail

}  // namespace geowalk::simd

#else

namespace geowalk::simd::detail {
const KernelTable* avx2_table_if_built() { return nullptr; }
}  // namespace geowalk::simd::detail

#endif
