// AVX2 variants of the plane-distance kernels. Deliberately mul+add rather
// than FMA: the lanes must round exactly like the scalar reference so that
// dispatch never changes an inlier decision.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "hado/kernels.hpp"

namespace hado::kernels {

namespace {

inline __m256d plane_distance4(const CloudView& c, std::size_t i, __m256d nx,
                               __m256d ny, __m256d nz, __m256d off) {
  const __m256d x = _mm256_loadu_pd(c.xs + i);
  const __m256d y = _mm256_loadu_pd(c.ys + i);
  const __m256d z = _mm256_loadu_pd(c.zs + i);
  __m256d acc = _mm256_mul_pd(nx, x);
  acc = _mm256_add_pd(acc, _mm256_mul_pd(ny, y));
  acc = _mm256_add_pd(acc, _mm256_mul_pd(nz, z));
  return _mm256_sub_pd(acc, off);
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

}  // namespace

std::size_t count_inliers_avx2(const CloudView& c, double nx, double ny, double nz,
                               double offset, double tol) {
  const __m256d vnx = _mm256_set1_pd(nx);
  const __m256d vny = _mm256_set1_pd(ny);
  const __m256d vnz = _mm256_set1_pd(nz);
  const __m256d voff = _mm256_set1_pd(offset);
  const __m256d vtol = _mm256_set1_pd(tol);

  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= c.n; i += 4) {
    const __m256d d = plane_distance4(c, i, vnx, vny, vnz, voff);
    const __m256d ad = _mm256_and_pd(d, kAbsMask);
    const __m256d le = _mm256_cmp_pd(ad, vtol, _CMP_LE_OQ);
    count += static_cast<std::size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(le))));
  }
  for (; i < c.n; ++i) {
    const double d = nx * c.xs[i] + ny * c.ys[i] + nz * c.zs[i] - offset;
    if ((d < 0 ? -d : d) <= tol) ++count;
  }
  return count;
}

std::size_t collect_inliers_avx2(const CloudView& c, double nx, double ny, double nz,
                                 double offset, double tol, std::uint32_t* out) {
  const __m256d vnx = _mm256_set1_pd(nx);
  const __m256d vny = _mm256_set1_pd(ny);
  const __m256d vnz = _mm256_set1_pd(nz);
  const __m256d voff = _mm256_set1_pd(offset);
  const __m256d vtol = _mm256_set1_pd(tol);

  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= c.n; i += 4) {
    const __m256d d = plane_distance4(c, i, vnx, vny, vnz, voff);
    const __m256d ad = _mm256_and_pd(d, kAbsMask);
    unsigned mask = static_cast<unsigned>(
        _mm256_movemask_pd(_mm256_cmp_pd(ad, vtol, _CMP_LE_OQ)));
    while (mask) {
      const unsigned lane = static_cast<unsigned>(__builtin_ctz(mask));
      out[count++] = static_cast<std::uint32_t>(i + lane);
      mask &= mask - 1;
    }
  }
  for (; i < c.n; ++i) {
    const double d = nx * c.xs[i] + ny * c.ys[i] + nz * c.zs[i] - offset;
    if ((d < 0 ? -d : d) <= tol) out[count++] = static_cast<std::uint32_t>(i);
  }
  return count;
}

}  // namespace hado::kernels

#endif  // x86_64
