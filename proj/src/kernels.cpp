#include "hado/kernels.hpp"

#include <atomic>
#include <cmath>

namespace hado::kernels {

std::size_t count_inliers_scalar(const CloudView& c, double nx, double ny, double nz,
                                 double offset, double tol) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double d = nx * c.xs[i] + ny * c.ys[i] + nz * c.zs[i] - offset;
    if (std::abs(d) <= tol) ++count;
  }
  return count;
}

std::size_t collect_inliers_scalar(const CloudView& c, double nx, double ny, double nz,
                                   double offset, double tol, std::uint32_t* out) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double d = nx * c.xs[i] + ny * c.ys[i] + nz * c.zs[i] - offset;
    if (std::abs(d) <= tol) out[count++] = static_cast<std::uint32_t>(i);
  }
  return count;
}

namespace {

using CountFn = std::size_t (*)(const CloudView&, double, double, double, double, double);
using CollectFn = std::size_t (*)(const CloudView&, double, double, double, double,
                                  double, std::uint32_t*);

struct Dispatch {
  CountFn count = &count_inliers_scalar;
  CollectFn collect = &collect_inliers_scalar;
  const char* name = "scalar";
};

Dispatch detect() {
  Dispatch d;
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) {
    d.count = &count_inliers_avx2;
    d.collect = &collect_inliers_avx2;
    d.name = "avx2";
  }
#endif
  return d;
}

Dispatch& dispatch() {
  static Dispatch d = detect();
  return d;
}

std::atomic<bool> g_force_scalar{false};

}  // namespace

std::size_t count_inliers(const CloudView& c, double nx, double ny, double nz,
                          double offset, double tol) {
  if (g_force_scalar.load(std::memory_order_relaxed))
    return count_inliers_scalar(c, nx, ny, nz, offset, tol);
  return dispatch().count(c, nx, ny, nz, offset, tol);
}

std::size_t collect_inliers(const CloudView& c, double nx, double ny, double nz,
                            double offset, double tol, std::uint32_t* out) {
  if (g_force_scalar.load(std::memory_order_relaxed))
    return collect_inliers_scalar(c, nx, ny, nz, offset, tol, out);
  return dispatch().collect(c, nx, ny, nz, offset, tol, out);
}

const char* active_kernel() {
  return g_force_scalar.load(std::memory_order_relaxed) ? "scalar" : dispatch().name;
}

void force_scalar_kernels(bool on) {
  g_force_scalar.store(on, std::memory_order_relaxed);
}

}  // namespace hado::kernels
