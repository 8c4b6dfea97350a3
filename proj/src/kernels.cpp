#include "spaam/kernels.hpp"

#include "spaam/errors.hpp"

#include <atomic>
#include <limits>

namespace spaam::kernels {

namespace scalar {

SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n) {
    SegmentHit best;
    best.dist2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double dx = bx[i] - ax[i];
        double dy = by[i] - ay[i];
        double rx = px - ax[i];
        double ry = py - ay[i];
        double num = rx * dx + ry * dy;
        double den = dx * dx + dy * dy;
        double t = den > 0.0 ? num / den : 0.0;
        if (t < 0.0) t = 0.0;
        if (t > 1.0) t = 1.0;
        double ex = rx - t * dx;
        double ey = ry - t * dy;
        double d2 = ex * ex + ey * ey;
        if (d2 < best.dist2) {
            best.dist2 = d2;
            best.index = static_cast<int>(i);
            best.t = t;
        }
    }
    return best;
}

void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double dx = px - xs[i];
        double dy = py - ys[i];
        out[i] = dx * dx + dy * dy;
    }
}

}  // namespace scalar

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<Backend> g_backend{cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar};

}  // namespace

bool backend_available(Backend b) {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2: return cpu_has_avx2();
    }
    return false;
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void force_backend(Backend b) {
    if (!backend_available(b)) {
        throw InternalError("kernel backend not available on this CPU: " + backend_name(b));
    }
    g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n) {
    if (active_backend() == Backend::Avx2) {
        return avx2::nearest_segment(px, py, ax, ay, bx, by, n);
    }
    return scalar::nearest_segment(px, py, ax, ay, bx, by, n);
}

void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out) {
    if (active_backend() == Backend::Avx2) {
        avx2::dist2_row(px, py, xs, ys, n, out);
        return;
    }
    scalar::dist2_row(px, py, xs, ys, n, out);
}

#if !defined(__x86_64__) && !defined(__i386__)
namespace avx2 {
SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n) {
    return scalar::nearest_segment(px, py, ax, ay, bx, by, n);
}
void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out) {
    scalar::dist2_row(px, py, xs, ys, n, out);
}
}  // namespace avx2
#endif

}  // namespace spaam::kernels
