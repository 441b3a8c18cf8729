#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops behind the protocol and the gradient oracles.
//
// Each kernel exists as a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is chosen once at startup from CPUID,
// overridable with PISCO_KERNELS=scalar|avx2. Scalar and SIMD variants are
// equivalence-tested against each other; they may differ in the last ulp
// because horizontal sums reassociate, so callers must not rely on bitwise
// equality across backends (within one backend results are deterministic).

namespace pisco::kernels {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sumsq_diff)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    // y += a - b, one pass (gradient-tracking correction)
    void (*add_diff)(double*, const double*, const double*, std::size_t);
    // out = c1*x1 + c2*x2 + c3*x3 (communication-phase combination)
    void (*lincomb3)(double*, double, const double*, double, const double*,
                     double, const double*, std::size_t);
};

namespace scalar {
extern const Ops ops;
}

namespace avx2 {
bool available();       // compiled in and supported by this CPU
extern const Ops ops;   // valid to call only if available()
}

// Dispatched entry points.
const Ops& active();
std::string_view backend_name();

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double sumsq(const double* x, std::size_t n) { return active().sumsq(x, n); }
inline double sumsq_diff(const double* x, const double* y, std::size_t n) { return active().sumsq_diff(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
inline void add_diff(double* y, const double* a, const double* b, std::size_t n) { active().add_diff(y, a, b, n); }
inline void lincomb3(double* out, double c1, const double* x1, double c2, const double* x2,
                     double c3, const double* x3, std::size_t n) {
    active().lincomb3(out, c1, x1, c2, x2, c3, x3, n);
}

}  // namespace pisco::kernels
