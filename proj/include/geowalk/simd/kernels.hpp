#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; both use the same operation order (four interleaved lanes, then
// (l0+l1)+(l2+l3)) so their results are bit-identical. The variant is chosen
// once at runtime from CPUID, overridable with GEOWALK_ISA=scalar.

#include <cstddef>
#include <cstdint>

namespace geowalk::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    const char* name;
    /// out[j] = sum_k (soa[k*stride + j] - q[k])^2 for j < n.
    void (*sq_distances)(const double* soa, std::size_t stride, std::size_t n, int dim, const double* q,
                         double* out);
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y += a*x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    /// y = x + b*y
    void (*xpby)(const double* x, double b, double* y, std::size_t n);
    /// y = A x for a CSR matrix with 32-bit column indices.
    void (*csr_matvec)(const std::uint32_t* row_ptr, const std::uint32_t* cols, const double* vals,
                       const double* x, double* y, std::size_t n_rows);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();
/// The table used by library code.
const KernelTable& active_kernels();
/// Select a variant explicitly (tests, benchmarks). Returns false if unavailable.
bool force_isa(Isa isa);

namespace detail {
const KernelTable* avx2_table_if_built();
}

}  // namespace geowalk::simd
