#include "visnow/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <bit>
#include <cstring>

namespace visnow::simd::detail {

namespace {

void grad_hess(const double* p, const double* y, const double* w, double* g, double* h, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d pv = _mm256_loadu_pd(p + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d wv = _mm256_loadu_pd(w + i);
        _mm256_storeu_pd(g + i, _mm256_mul_pd(wv, _mm256_sub_pd(pv, yv)));
        _mm256_storeu_pd(h + i, _mm256_mul_pd(wv, _mm256_mul_pd(pv, _mm256_sub_pd(one, pv))));
    }
    for (; i < n; ++i) {
        g[i] = w[i] * (p[i] - y[i]);
        h[i] = w[i] * (p[i] * (1.0 - p[i]));
    }
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d pair = _mm_hadd_pd(lo, hi); // [l0 + l1, l2 + l3]
    double s = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
    for (; i < n; ++i) s += x[i];
    return s;
}

void gather_add(double* acc, const double* table, const std::int32_t* idx, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        __m256d t = _mm256_i32gather_pd(table, vi, 8);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), t));
    }
    for (; i < n; ++i) acc[i] += table[idx[i]];
}

ConfusionCounts confusion(const double* prob, const std::uint8_t* truth, double threshold, std::size_t n) {
    const __m256d thr = _mm256_set1_pd(threshold);
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        unsigned pm = unsigned(_mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(prob + i), thr, _CMP_GE_OQ)));
        std::int32_t bytes;
        std::memcpy(&bytes, truth + i, 4);
        __m256i t64 = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(bytes));
        unsigned tm = unsigned(_mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(t64, zero)))) ^ 0xFu;
        tp += unsigned(std::popcount(pm & tm));
        fp += unsigned(std::popcount(pm & ~tm & 0xFu));
        fn += unsigned(std::popcount(~pm & tm & 0xFu));
        tn += unsigned(std::popcount(~pm & ~tm & 0xFu));
    }
    ConfusionCounts c{tn, fp, fn, tp};
    for (; i < n; ++i) {
        bool pred = prob[i] >= threshold;
        bool t = truth[i] != 0;
        if (pred) (t ? c.tp : c.fp)++;
        else (t ? c.fn : c.tn)++;
    }
    return c;
}

const KernelTable table{grad_hess, sum, gather_add, confusion};

} // namespace

const KernelTable* avx2_table() { return &table; }

} // namespace visnow::simd::detail

#else

namespace visnow::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
} // namespace visnow::simd::detail

#endif
