#include "visnow/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace visnow::simd::detail {

namespace {

void grad_hess(const double* p, const double* y, const double* w, double* g, double* h, std::size_t n) {
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t pv = vld1q_f64(p + i);
        float64x2_t yv = vld1q_f64(y + i);
        float64x2_t wv = vld1q_f64(w + i);
        vst1q_f64(g + i, vmulq_f64(wv, vsubq_f64(pv, yv)));
        vst1q_f64(h + i, vmulq_f64(wv, vmulq_f64(pv, vsubq_f64(one, pv))));
    }
    for (; i < n; ++i) {
        g[i] = w[i] * (p[i] - y[i]);
        h[i] = w[i] * (p[i] * (1.0 - p[i]));
    }
}

// Two 2-lane registers emulate the four lanes of the reference.
double sum(const double* x, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(x + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(x + i + 2));
    }
    double s = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
               (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
    for (; i < n; ++i) s += x[i];
    return s;
}

void gather_add(double* acc, const double* table, const std::int32_t* idx, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t t = {table[idx[i]], table[idx[i + 1]]};
        vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), t));
    }
    for (; i < n; ++i) acc[i] += table[idx[i]];
}

ConfusionCounts confusion(const double* prob, const std::uint8_t* truth, double threshold, std::size_t n) {
    const float64x2_t thr = vdupq_n_f64(threshold);
    uint64x2_t tp = vdupq_n_u64(0), fp = tp, fn = tp, tn = tp;
    const uint64x2_t one = vdupq_n_u64(1);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        uint64x2_t pred = vcgeq_f64(vld1q_f64(prob + i), thr);
        uint64x2_t t = {truth[i] ? ~0ull : 0ull, truth[i + 1] ? ~0ull : 0ull};
        tp = vaddq_u64(tp, vandq_u64(vandq_u64(pred, t), one));
        fp = vaddq_u64(fp, vandq_u64(vbicq_u64(pred, t), one));
        fn = vaddq_u64(fn, vandq_u64(vbicq_u64(t, pred), one));
        tn = vaddq_u64(tn, vandq_u64(vbicq_u64(vbicq_u64(one, pred), t), one));
    }
    ConfusionCounts c{vaddvq_u64(tn), vaddvq_u64(fp), vaddvq_u64(fn), vaddvq_u64(tp)};
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

const KernelTable* neon_table() { return &table; }

} // namespace visnow::simd::detail

#else

namespace visnow::simd::detail {
const KernelTable* neon_table() { return nullptr; }
} // namespace visnow::simd::detail

#endif
