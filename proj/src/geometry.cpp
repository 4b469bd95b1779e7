#include "hado/geometry.hpp"

namespace hado {

Quat quat_from_axes(const Vec3& ex, const Vec3& ey, const Vec3& ez) {
  // Shepperd's method over the rotation matrix with columns ex, ey, ez.
  const double m00 = ex.x, m01 = ey.x, m02 = ez.x;
  const double m10 = ex.y, m11 = ey.y, m12 = ez.y;
  const double m20 = ex.z, m21 = ey.z, m22 = ez.z;
  const double trace = m00 + m11 + m22;
  Quat q;
  if (trace > 0.0) {
    double s = std::sqrt(trace + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m21 - m12) / s;
    q.y = (m02 - m20) / s;
    q.z = (m10 - m01) / s;
  } else if (m00 > m11 && m00 > m22) {
    double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q.w = (m21 - m12) / s;
    q.x = 0.25 * s;
    q.y = (m01 + m10) / s;
    q.z = (m02 + m20) / s;
  } else if (m11 > m22) {
    double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q.w = (m02 - m20) / s;
    q.x = (m01 + m10) / s;
    q.y = 0.25 * s;
    q.z = (m12 + m21) / s;
  } else {
    double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q.w = (m10 - m01) / s;
    q.x = (m02 + m20) / s;
    q.y = (m12 + m21) / s;
    q.z = 0.25 * s;
  }
  return q.normalized();
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return (p - a).norm();
  const double t = clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  const Vec2 closest = a + ab * t;
  return (p - closest).norm();
}

}  // namespace hado
