#pragma once

#include "qmetro/common.hpp"

namespace qmetro {

// Angular momentum matrices and rotation representations for modest spins
// (two_j <= 4). Basis convention everywhere: storage index i carries
// m = j - i, i.e. m descends from +j to -j.

namespace detail {
inline double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(33, 1.0);
    for (int k = 1; k < 33; ++k) t[k] = t[k - 1] * k;
    return t;
  }();
  return table.at(n);
}
}  // namespace detail

inline Matrix jz_matrix(int two_j) {
  const int d = two_j + 1;
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = 0.5 * (two_j - 2 * i);
  return m;
}

inline Matrix jplus_matrix(int two_j) {
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  Matrix m = Matrix::Zero(d, d);
  for (int i = 1; i < d; ++i) {
    const double mm = j - i;  // J+ |j,m> = sqrt(j(j+1)-m(m+1)) |j,m+1>
    m(i - 1, i) = std::sqrt(j * (j + 1) - mm * (mm + 1));
  }
  return m;
}

inline Matrix jy_matrix(int two_j) {
  const Matrix jp = jplus_matrix(two_j);
  return (jp - jp.adjoint()) / complex(0.0, 2.0);
}

inline Matrix jx_matrix(int two_j) {
  const Matrix jp = jplus_matrix(two_j);
  return (jp + jp.adjoint()) / 2.0;
}

// Explicit little-d sum; all inputs doubled to keep half-integers exact.
inline double wigner_d_element(int two_j, int two_mp, int two_m,
                               double beta) {
  require(two_j >= 0 && two_j <= 4, "wigner d: supports two_j <= 4");
  require(std::abs(two_mp) <= two_j && std::abs(two_m) <= two_j &&
              (two_j - two_mp) % 2 == 0 && (two_j - two_m) % 2 == 0,
          "wigner d: invalid projection");
  using detail::factorial;
  const int jpm = (two_j + two_m) / 2, jmm = (two_j - two_m) / 2;
  const int jpp = (two_j + two_mp) / 2, jmp = (two_j - two_mp) / 2;
  const double pref = std::sqrt(factorial(jpp) * factorial(jmp) *
                                factorial(jpm) * factorial(jmm));
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const int dm = (two_mp - two_m) / 2;  // m' - m
  double sum = 0.0;
  const int k_min = std::max(0, -dm);
  const int k_max = std::min(jpm, jmp);
  for (int k = k_min; k <= k_max; ++k) {
    const double denom = factorial(jpm - k) * factorial(k) *
                         factorial(dm + k) * factorial(jmp - k);
    const double sign = ((dm + k) % 2 == 0) ? 1.0 : -1.0;
    sum += sign / denom * std::pow(c, two_j - dm - 2 * k) *
           std::pow(s, dm + 2 * k);
  }
  return pref * sum;
}

inline RealMatrix wigner_d_matrix(int two_j, double beta) {
  const int d = two_j + 1;
  RealMatrix m(d, d);
  for (int ip = 0; ip < d; ++ip)
    for (int i = 0; i < d; ++i)
      m(ip, i) = wigner_d_element(two_j, two_j - 2 * ip, two_j - 2 * i, beta);
  return m;
}

// Full rotation matrix e^{-i alpha Jz} e^{-i beta Jy} e^{-i gamma Jz}.
inline Matrix wigner_big_d(int two_j, double alpha, double beta,
                           double gamma) {
  const int d = two_j + 1;
  const RealMatrix small = wigner_d_matrix(two_j, beta);
  Matrix m(d, d);
  for (int ip = 0; ip < d; ++ip) {
    const double mp = 0.5 * (two_j - 2 * ip);
    for (int i = 0; i < d; ++i) {
      const double mm = 0.5 * (two_j - 2 * i);
      const double phase = -mp * alpha - mm * gamma;
      m(ip, i) = small(ip, i) * complex(std::cos(phase), std::sin(phase));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// SO(3) elements as 3x3 matrices with z-y-z Euler coordinates
// ---------------------------------------------------------------------------

struct EulerAngles {
  double alpha;  // [0, 2pi)
  double beta;   // [0, pi]
  double gamma;  // [0, 2pi)
};

inline Eigen::Matrix3d rotation_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0,
      0.0, 1.0;
  return r;
}

inline Eigen::Matrix3d rotation_y(double b) {
  Eigen::Matrix3d r;
  r << std::cos(b), 0.0, std::sin(b), 0.0, 1.0, 0.0, -std::sin(b), 0.0,
      std::cos(b);
  return r;
}

inline Eigen::Matrix3d rotation_zyz(const EulerAngles& e) {
  return rotation_z(e.alpha) * rotation_y(e.beta) * rotation_z(e.gamma);
}

inline double wrap_two_pi(double a) {
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

// Inverse of rotation_zyz. Gimbal rows (sin beta ~ 0) resolve with gamma = 0.
inline EulerAngles euler_from_rotation(const Eigen::Matrix3d& r) {
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  const double beta = std::acos(cb);
  if (std::sin(beta) < 1e-12) {
    if (cb > 0.0)
      return EulerAngles{wrap_two_pi(std::atan2(r(1, 0), r(0, 0))), 0.0, 0.0};
    return EulerAngles{wrap_two_pi(std::atan2(-r(1, 0), -r(0, 0))), pi, 0.0};
  }
  const double alpha = std::atan2(r(1, 2), r(0, 2));
  const double gamma = std::atan2(r(2, 1), -r(2, 0));
  return EulerAngles{wrap_two_pi(alpha), beta, wrap_two_pi(gamma)};
}

}  // namespace qmetro
