// Data-parallel inner loops behind the plane fitter.
//
// The scalar versions are the reference; the AVX2 variants use plain
// mul/add (no FMA) so they round identically and the dispatch choice can
// never change a result. Selection happens once at startup via cpuid and can
// be forced with force_scalar_kernels() for equivalence tests.
#pragma once

#include <cstddef>
#include <cstdint>

namespace hado::kernels {

// Structure-of-arrays point cloud view.
struct CloudView {
  const double* xs = nullptr;
  const double* ys = nullptr;
  const double* zs = nullptr;
  std::size_t n = 0;
};

// Number of points with |n.p - offset| <= tol.
std::size_t count_inliers(const CloudView& cloud, double nx, double ny, double nz,
                          double offset, double tol);

// Writes inlier indices to out (capacity >= cloud.n); returns the count.
std::size_t collect_inliers(const CloudView& cloud, double nx, double ny, double nz,
                            double offset, double tol, std::uint32_t* out);

// Reference implementations, always available.
std::size_t count_inliers_scalar(const CloudView& cloud, double nx, double ny,
                                 double nz, double offset, double tol);
std::size_t collect_inliers_scalar(const CloudView& cloud, double nx, double ny,
                                   double nz, double offset, double tol,
                                   std::uint32_t* out);

#if defined(__x86_64__) || defined(_M_X64)
std::size_t count_inliers_avx2(const CloudView& cloud, double nx, double ny,
                               double nz, double offset, double tol);
std::size_t collect_inliers_avx2(const CloudView& cloud, double nx, double ny,
                                 double nz, double offset, double tol,
                                 std::uint32_t* out);
#endif

// Name of the variant currently dispatched ("scalar" or "avx2").
const char* active_kernel();

void force_scalar_kernels(bool on);

}  // namespace hado::kernels
