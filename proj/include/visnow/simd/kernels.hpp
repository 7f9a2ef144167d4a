#pragma once

// Data-parallel inner loops of training and verification.
//
// Every kernel has a scalar reference implementation and SIMD variants
// (AVX2 on x86-64, NEON on AArch64). The variant is selected at runtime from
// CPU capabilities, or forced with VISNOW_SIMD=scalar|avx2|neon. All variants
// produce bit-identical results: elementwise kernels avoid fused
// multiply-add, and reductions accumulate in four interleaved lanes that the
// scalar reference reproduces exactly. Trained models therefore do not
// depend on the host ISA.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace visnow::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct ConfusionCounts {
    std::uint64_t tn = 0, fp = 0, fn = 0, tp = 0;
    bool operator==(const ConfusionCounts&) const = default;
};

struct KernelTable {
    /// g[i] = w[i] * (p[i] - y[i]);  h[i] = w[i] * p[i] * (1 - p[i])
    void (*grad_hess)(const double* p, const double* y, const double* w, double* g, double* h, std::size_t n);
    /// Sum with 4-lane interleaved accumulation; lanes combined as
    /// (l0 + l1) + (l2 + l3), then the tail added in order.
    double (*sum)(const double* x, std::size_t n);
    /// acc[i] += table[idx[i]]
    void (*gather_add)(double* acc, const double* table, const std::int32_t* idx, std::size_t n);
    /// Cell counts for pred = (prob >= threshold), truth in {0,1}.
    ConfusionCounts (*confusion)(const double* prob, const std::uint8_t* truth, double threshold, std::size_t n);
};

/// Whether `isa` can run on this build and CPU.
bool supported(Isa isa);
/// Best ISA supported by this CPU.
Isa detected();
/// ISA used by the span wrappers below.
Isa active();
/// Override the active ISA; throws std::invalid_argument if unsupported.
void set_active(Isa isa);
/// Kernel table for a specific ISA (must be supported).
const KernelTable& table(Isa isa);
/// All ISAs supported here, scalar first.
std::vector<Isa> available();

void grad_hess(std::span<const double> p, std::span<const double> y, std::span<const double> w,
               std::span<double> g, std::span<double> h);
double sum(std::span<const double> x);
void gather_add(std::span<double> acc, std::span<const double> table, std::span<const std::int32_t> idx);
ConfusionCounts confusion(std::span<const double> prob, std::span<const std::uint8_t> truth, double threshold);

namespace detail {
extern const KernelTable scalar_table;
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
} // namespace detail

} // namespace visnow::simd
