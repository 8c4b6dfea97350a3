// AVX2 variants of the spatial kernels. Compiled with -mavx2 and
// -ffp-contract=off; operation order matches the scalar reference exactly
// so results are bit-identical (no FMA anywhere on either path).

#if defined(__x86_64__) || defined(__i386__)

#include "spaam/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace spaam::kernels::avx2 {

SegmentHit nearest_segment(double px, double py, const double* ax, const double* ay,
                           const double* bx, const double* by, std::size_t n) {
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d four = _mm256_set1_pd(4.0);

    __m256d best_d2 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d best_t = zero;
    __m256d best_idx = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vax = _mm256_loadu_pd(ax + i);
        __m256d vay = _mm256_loadu_pd(ay + i);
        __m256d vbx = _mm256_loadu_pd(bx + i);
        __m256d vby = _mm256_loadu_pd(by + i);

        __m256d dx = _mm256_sub_pd(vbx, vax);
        __m256d dy = _mm256_sub_pd(vby, vay);
        __m256d rx = _mm256_sub_pd(vpx, vax);
        __m256d ry = _mm256_sub_pd(vpy, vay);

        __m256d num = _mm256_add_pd(_mm256_mul_pd(rx, dx), _mm256_mul_pd(ry, dy));
        __m256d den = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));

        __m256d pos = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
        __m256d t = _mm256_blendv_pd(zero, _mm256_div_pd(num, den), pos);
        t = _mm256_max_pd(t, zero);
        t = _mm256_min_pd(t, one);

        __m256d ex = _mm256_sub_pd(rx, _mm256_mul_pd(t, dx));
        __m256d ey = _mm256_sub_pd(ry, _mm256_mul_pd(t, dy));
        __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));

        __m256d lt = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
        best_d2 = _mm256_blendv_pd(best_d2, d2, lt);
        best_t = _mm256_blendv_pd(best_t, t, lt);
        best_idx = _mm256_blendv_pd(best_idx, idx, lt);
        idx = _mm256_add_pd(idx, four);
    }

    double lane_d2[4], lane_t[4], lane_idx[4];
    _mm256_storeu_pd(lane_d2, best_d2);
    _mm256_storeu_pd(lane_t, best_t);
    _mm256_storeu_pd(lane_idx, best_idx);

    SegmentHit best;
    best.dist2 = std::numeric_limits<double>::infinity();
    for (int l = 0; l < 4; ++l) {
        if (lane_idx[l] < 0.0) continue;
        int li = static_cast<int>(lane_idx[l]);
        if (lane_d2[l] < best.dist2 || (lane_d2[l] == best.dist2 && li < best.index)) {
            best.dist2 = lane_d2[l];
            best.t = lane_t[l];
            best.index = li;
        }
    }

    // Tail indices are all larger than the vector part; strict < keeps the
    // earliest index, matching the scalar scan.
    for (; i < n; ++i) {
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
    const __m256d vpx = _mm256_set1_pd(px);
    const __m256d vpy = _mm256_set1_pd(py);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs + i));
        __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys + i));
        __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        _mm256_storeu_pd(out + i, d2);
    }
    for (; i < n; ++i) {
        double dx = px - xs[i];
        double dy = py - ys[i];
        out[i] = dx * dx + dy * dy;
    }
}

}  // namespace spaam::kernels::avx2

#endif  // x86
