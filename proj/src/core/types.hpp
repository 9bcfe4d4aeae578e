#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace hygrohom {

using Field = std::vector<double>;

// Symmetric-capable 2x2 matrix for effective tensors and per-element
// coefficient tensors. Row-major.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 scalar(double s) { return {s, 0.0, 0.0, s}; }

  Mat2 scaled(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }

  std::array<double, 2> apply(double x, double y) const {
    return {a11 * x + a12 * y, a21 * x + a22 * y};
  }

  // Eigenvalues of the symmetrized matrix.
  std::array<double, 2> sym_eigenvalues() const {
    const double m = 0.5 * (a11 + a22);
    const double off = 0.5 * (a12 + a21);
    const double d = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + off * off);
    return {m - d, m + d};
  }

  bool is_spd(double sym_rel_tol = 1e-8) const {
    const double scale = std::abs(a11) + std::abs(a22);
    if (std::abs(a12 - a21) > sym_rel_tol * (scale > 0 ? scale : 1.0)) return false;
    auto ev = sym_eigenvalues();
    return ev[0] > 0.0;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-index noise in [-1, 1], used for rough initial fields.
inline double hash_noise(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(index));
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace hygrohom
