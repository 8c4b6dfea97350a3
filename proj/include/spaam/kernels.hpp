#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops behind the spatial queries: nearest-segment
// scans and squared-distance rows. Scalar reference implementations are
// the source of truth; the AVX2 variants are selected at runtime and must
// produce bit-identical results (both paths are compiled without FP
// contraction and use the same operation order).

namespace spaam::kernels {

struct SegmentHit {
    int index = -1;      // segment index, lowest index wins ties
    double dist2 = 0.0;  // squared distance point -> segment
    double t = 0.0;      // projection parameter in [0,1] along the segment
};

enum class Backend { Scalar, Avx2 };

bool backend_available(Backend b);
Backend active_backend();
// Throws spaam::InternalError if the backend is not available on this CPU.
void force_backend(Backend b);
std::string backend_name(Backend b);

// Nearest segment to (px,py) over SoA arrays of segment endpoints.
SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n);

// out[i] = squared distance from (px,py) to (xs[i], ys[i]).
void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out);

namespace scalar {
SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n);
void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out);
}  // namespace scalar

namespace avx2 {
// Defined only when built on x86-64; guard calls with backend_available().
SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n);
void dist2_row(double px, double py, const double* xs, const double* ys, std::size_t n,
               double* out);
}  // namespace avx2

}  // namespace spaam::kernels
