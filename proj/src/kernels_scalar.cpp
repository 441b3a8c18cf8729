#include "pisco/kernels.hpp"

namespace pisco::kernels::scalar {

namespace {

double dot_(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double sumsq_(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double sumsq_diff_(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

void axpy_(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal_(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void add_diff_(double* y, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a[i] - b[i];
}

void lincomb3_(double* out, double c1, const double* x1, double c2, const double* x2,
               double c3, const double* x3, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
}

}  // namespace

const Ops ops = {dot_, sumsq_, sumsq_diff_, axpy_, scal_, add_diff_, lincomb3_};

}  // namespace pisco::kernels::scalar
