#pragma once

#include <cmath>

namespace fgb {

struct Vec2 {
  double u = 0, v = 0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.u, s * a.v}; }
inline Vec2 operator-(Vec2 a) { return {-a.u, -a.v}; }
inline double dot(Vec2 a, Vec2 b) { return a.u * b.u + a.v * b.v; }
inline double det(Vec2 a, Vec2 b) { return a.u * b.v - a.v * b.u; }
inline double norm(Vec2 a) { return std::hypot(a.u, a.v); }
inline Vec2 normalized(Vec2 a) { return (1.0 / norm(a)) * a; }
// quarter turn, positive orientation
inline Vec2 perp(Vec2 a) { return {-a.v, a.u}; }

template <class T>
struct Vec3 {
  T x{}, y{}, z{};
  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

template <class T>
inline Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
template <class T>
inline Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
template <class T>
inline Vec3<T> operator-(const Vec3<T>& a) { return {-a.x, -a.y, -a.z}; }
template <class T, class S>
inline Vec3<T> operator*(const S& s, const Vec3<T>& a) { return {s * a.x, s * a.y, s * a.z}; }
template <class T>
inline T dot(const Vec3<T>& a, const Vec3<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
template <class T>
inline Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class T>
inline T det3(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) { return dot(cross(a, b), c); }

using V3 = Vec3<double>;
inline double norm(const V3& a) { return std::sqrt(dot(a, a)); }

}  // namespace fgb
