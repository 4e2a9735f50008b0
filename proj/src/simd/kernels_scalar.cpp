#include <atomic>
#include <cstdlib>
#include <cstring>

#include "geowalk/simd/kernels.hpp"

namespace geowalk::simd {

namespace {

void sq_distances_scalar(const double* soa, std::size_t stride, std::size_t n, int dim, const double* q,
                         double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        const double t = soa[j] - q[0];
        out[j] = t * t;
    }
    for (int k = 1; k < dim; ++k) {
        const double* row = soa + static_cast<std::size_t>(k) * stride;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = row[j] - q[k];
            out[j] = out[j] + t * t;
        }
    }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) lane[i & 3] += a[i] * b[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpby_scalar(const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void csr_matvec_scalar(const std::uint32_t* row_ptr, const std::uint32_t* cols, const double* vals, const double* x,
                       double* y, std::size_t n_rows) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double lane[4] = {0.0, 0.0, 0.0, 0.0};
        const std::uint32_t begin = row_ptr[r];
        const std::uint32_t end = row_ptr[r + 1];
        for (std::uint32_t p = begin; p < end; ++p) lane[(p - begin) & 3] += vals[p] * x[cols[p]];
        y[r] = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    }
}

const KernelTable kScalar = {Isa::Scalar,    "scalar",      sq_distances_scalar, dot_scalar,
                             axpy_scalar,    xpby_scalar,   csr_matvec_scalar};

const KernelTable* detect() {
    const char* env = std::getenv("GEOWALK_ISA");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
    const KernelTable* avx2 = avx2_kernels();
    return avx2 != nullptr ? avx2 : &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{detect()};
    return slot;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* avx2_kernels() {
    const KernelTable* t = detail::avx2_table_if_built();
    if (t == nullptr) return nullptr;
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") ? t : nullptr;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool force_isa(Isa isa) {
    const KernelTable* t = isa == Isa::Scalar ? &kScalar : avx2_kernels();
    if (t == nullptr) return false;
    active_slot().store(t, std::memory_order_release);
    return true;
}

}  // namespace geowalk::simd
