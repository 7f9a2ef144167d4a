#include "visnow/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace visnow::simd {

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

bool supported(Isa isa) {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::neon: return detail::neon_table() != nullptr;
    }
    return false;
}

Isa detected() {
    if (supported(Isa::avx2)) return Isa::avx2;
    if (supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

namespace {

Isa initial_isa() {
    const char* env = std::getenv("VISNOW_SIMD");
    if (env && *env) {
        std::string want(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
            if (want == isa_name(isa) && supported(isa)) return isa;
    }
    return detected();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

const KernelTable& active_table() { return table(current().load(std::memory_order_relaxed)); }

void check_len(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("simd kernel: span length mismatch");
}

} // namespace

Isa active() { return current().load(); }

void set_active(Isa isa) {
    if (!supported(isa)) throw std::invalid_argument("ISA not supported: " + std::string(isa_name(isa)));
    current().store(isa);
}

const KernelTable& table(Isa isa) {
    switch (isa) {
    case Isa::avx2:
        if (supported(isa)) return *detail::avx2_table();
        break;
    case Isa::neon:
        if (supported(isa)) return *detail::neon_table();
        break;
    case Isa::scalar: return detail::scalar_table;
    }
    throw std::invalid_argument("ISA not supported: " + std::string(isa_name(isa)));
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::scalar};
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (supported(isa)) out.push_back(isa);
    return out;
}

void grad_hess(std::span<const double> p, std::span<const double> y, std::span<const double> w,
               std::span<double> g, std::span<double> h) {
    check_len(p.size(), y.size());
    check_len(p.size(), w.size());
    check_len(p.size(), g.size());
    check_len(p.size(), h.size());
    active_table().grad_hess(p.data(), y.data(), w.data(), g.data(), h.data(), p.size());
}

double sum(std::span<const double> x) { return active_table().sum(x.data(), x.size()); }

void gather_add(std::span<double> acc, std::span<const double> table, std::span<const std::int32_t> idx) {
    check_len(acc.size(), idx.size());
    for (std::int32_t i : idx)
        if (i < 0 || std::size_t(i) >= table.size()) throw std::out_of_range("gather_add: index out of range");
    active_table().gather_add(acc.data(), table.data(), idx.data(), acc.size());
}

ConfusionCounts confusion(std::span<const double> prob, std::span<const std::uint8_t> truth, double threshold) {
    check_len(prob.size(), truth.size());
    return active_table().confusion(prob.data(), truth.data(), threshold, prob.size());
}

} // namespace visnow::simd
