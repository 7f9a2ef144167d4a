#include "visnow/simd/kernels.hpp"

namespace visnow::simd::detail {

namespace {

void grad_hess(const double* p, const double* y, const double* w, double* g, double* h, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = w[i] * (p[i] - y[i]);
        h[i] = w[i] * (p[i] * (1.0 - p[i]));
    }
}

double sum(const double* x, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        lane[0] += x[i];
        lane[1] += x[i + 1];
        lane[2] += x[i + 2];
        lane[3] += x[i + 3];
    }
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) s += x[i];
    return s;
}

void gather_add(double* acc, const double* table, const std::int32_t* idx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += table[idx[i]];
}

ConfusionCounts confusion(const double* prob, const std::uint8_t* truth, double threshold, std::size_t n) {
    ConfusionCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        bool pred = prob[i] >= threshold;
        bool t = truth[i] != 0;
        if (pred) (t ? c.tp : c.fp)++;
        else (t ? c.fn : c.tn)++;
    }
    return c;
}

} // namespace

const KernelTable scalar_table{grad_hess, sum, gather_add, confusion};

} // namespace visnow::simd::detail
