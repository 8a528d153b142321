#pragma once

#include <Eigen/Dense>

namespace pv {

using Vec2 = Eigen::Vector2d;

// Clockwise rotation by pi/2: J(a,b) = (b,-a).
inline Vec2 rot_cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Mean of ln(1/|z - center|) over a unit square equals this constant; for a
// square of side h the mean is c0 + ln(1/h). Closed form 3/2 + (ln 2)/2 - pi/4,
// obtained from the antiderivative
//   int ln(x^2+y^2) dx = x ln(x^2+y^2) - 2x + 2y atan(x/y),
// which gives int_{[-a,a]^2} ln|z| dz = 4 a^2 (ln 2 + 2 ln a + pi/2 - 3) / 2.
// The value is cross-checked against a graded Gauss-Legendre quadrature in the
// unit tests.
inline constexpr double kLogKernelSquareAvg = 1.0611754268825244;

} // namespace pv
