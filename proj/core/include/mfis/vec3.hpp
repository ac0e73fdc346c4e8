// Small fixed-size real/complex 3-vectors and the lattice index type.
// Deliberately minimal: the hot loops want flat doubles, and everything else
// is lighter than pulling a linear-algebra dependency for dot/cross products.
#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>

namespace mfis {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cdouble kImag{0.0, 1.0};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Integer lattice vector l in Z^3; ordering is lexicographic so that any
// container keyed by Vec3i iterates in a reproducible order.
struct Vec3i {
  int x = 0, y = 0, z = 0;
  friend auto operator<=>(const Vec3i&, const Vec3i&) = default;
};

inline int norm2(const Vec3i& l) { return l.x * l.x + l.y * l.y + l.z * l.z; }
inline Vec3 to_vec3(const Vec3i& l) { return {double(l.x), double(l.y), double(l.z)}; }

struct CVec3 {
  cdouble x{}, y{}, z{};
};

inline CVec3 operator+(const CVec3& a, const CVec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline CVec3 operator-(const CVec3& a, const CVec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline CVec3 operator*(const cdouble& s, const CVec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec3 operator*(const CVec3& a, const cdouble& s) { return s * a; }
inline CVec3 operator*(double s, const CVec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec3 operator*(const CVec3& a, double s) { return s * a; }
inline CVec3 operator*(const cdouble& s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline CVec3& operator+=(CVec3& a, const CVec3& b) {
  a.x += b.x;
  a.y += b.y;
  a.z += b.z;
  return a;
}
inline CVec3 to_cvec3(const Vec3& a) { return {cdouble(a.x), cdouble(a.y), cdouble(a.z)}; }

// Unconjugated dot products; write conjugation explicitly at the call site so
// sesquilinear pairings are visible in the formulas that use them.
inline cdouble dot(const CVec3& a, const CVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline cdouble dot(const CVec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline cdouble dot(const Vec3& a, const CVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline CVec3 conj(const CVec3& a) { return {std::conj(a.x), std::conj(a.y), std::conj(a.z)}; }
inline double norm2(const CVec3& a) { return std::norm(a.x) + std::norm(a.y) + std::norm(a.z); }

inline CVec3 cross(const Vec3& a, const CVec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline CVec3 cross(const CVec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

}  // namespace mfis
