#pragma once

// Cylindrical and spherical Bessel/Hankel functions of integer order and
// complex argument.
//
// Evaluation regimes for the cylinder functions (|m| <= 200, |z| <= 1e4):
//   |z| <= 2                      ascending power series for J, Neumann
//                                 series for Y0/Y1 + upward recurrence
//   2 < |z| < 25, or |m| >= |z|   Miller backward recurrence for J,
//                                 normalised with the generating function
//                                 e^{+-iz} = J0 + 2 sum (+-i)^k J_k
//   |z| >= 25 and |m| < |z|       Hankel asymptotic expansion for orders
//                                 0 and 1, upward recurrence for higher m
// Y always comes from orders 0/1 followed by upward recurrence, which is the
// stable direction for the dominant solution.
//
// All functions are pure and thread-safe.

#include <complex>

namespace spinrad::specfun {

using cplx = std::complex<double>;

inline constexpr int kMaxOrder = 200;
inline constexpr double kMaxArgument = 1e4;

enum class HankelKind { First = 1, Second = 2 };
enum class SphericalKind { J, H1 };

/// Regular cylinder function J_m(z).
cplx bessel_j(int m, cplx z);

/// Irregular cylinder function Y_m(z); z != 0.
cplx bessel_y(int m, cplx z);

/// H^(1)_m(z) = J + iY, H^(2)_m(z) = J - iY. For real z the second kind is the
/// exact complex conjugate of the first. Throws DomainError at z = 0.
cplx hankel(HankelKind kind, int m, cplx z);

/// d/dz J_m(z), from C'_m = C_{m-1} - (m/z) C_m.
cplx bessel_j_derivative(int m, cplx z);

/// d/dz H^(kind)_m(z).
cplx hankel_derivative(HankelKind kind, int m, cplx z);

/// W = H1 * d/dx H2 - d/dx H1 * H2, analytically -4i/(pi x). Evaluated from
/// the J/Y components so that it stays finite where H1 * H2 alone overflows.
cplx wronskian_h1h2(int m, double x);

/// Spherical j_l(z) or h^(1)_l(z), l >= 0. h^(1) at z = 0 is a DomainError.
cplx sph_bessel(SphericalKind kind, int l, cplx z);

}  // namespace spinrad::specfun
