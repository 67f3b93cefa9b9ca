#pragma once

#include <cstddef>

namespace latentwire::nn::kernels {

// Two GEMM shapes cover every dense and LSTM pass:
//   gemm_nn:  C[m x n]  (+)=  A[m x k] * B[k x n]
//   gemm_tn:  C[k x n]   +=   A[m x k]^T * B[m x n]
// Leading dimensions are row strides, so column slices of a wider matrix
// (one LSTM timestep) can be passed without copying.
//
// Each C element is owned by exactly one loop iteration and accumulates its
// terms in ascending inner-index order starting from zero (or from C when
// accumulating), so the parallel kernels are bit-identical to the serial ones
// for any thread count.

namespace serial {

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
             std::size_t ldc, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T* ci = c + i * ldc;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) ci[j] = T{0};
        const T* ai = a + i * lda;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = ai[p];
            const T* bp = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
             std::size_t ldc) {
    for (std::size_t p = 0; p < k; ++p) {
        T* cp = c + p * ldc;
        for (std::size_t r = 0; r < m; ++r) {
            const T arp = a[r * lda + p];
            const T* br = b + r * ldb;
            for (std::size_t j = 0; j < n; ++j) cp[j] += arp * br[j];
        }
    }
}

}  // namespace serial

namespace parallel {

inline constexpr std::size_t kMinParallelWork = 1 << 15;

template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
             std::size_t ldc, bool accumulate) {
    const bool wide = m * n * k >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        T* ci = c + i * ldc;
        if (!accumulate)
            for (std::size_t j = 0; j < n; ++j) ci[j] = T{0};
        const T* ai = a + i * lda;
        for (std::size_t p = 0; p < k; ++p) {
            const T aip = ai[p];
            const T* bp = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
             std::size_t ldc) {
    const bool wide = m * n * k >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (wide)
    for (std::ptrdiff_t pp = 0; pp < static_cast<std::ptrdiff_t>(k); ++pp) {
        const auto p = static_cast<std::size_t>(pp);
        T* cp = c + p * ldc;
        for (std::size_t r = 0; r < m; ++r) {
            const T arp = a[r * lda + p];
            const T* br = b + r * ldb;
            for (std::size_t j = 0; j < n; ++j) cp[j] += arp * br[j];
        }
    }
}

}  // namespace parallel

}  // namespace latentwire::nn::kernels
