#include "spinrad/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spinrad/errors.hpp"

namespace spinrad::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr cplx kI{0.0, 1.0};

constexpr double kSeriesRadius = 2.0;
constexpr double kAsymptoticRadius = 25.0;
constexpr double kRescale = 1e250;

void check_arguments(int m, cplx z, const char* who) {
  if (std::abs(m) > kMaxOrder) {
    throw DomainError(std::string(who) + ": order " + std::to_string(m) + " exceeds cap " +
                      std::to_string(kMaxOrder));
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError(std::string(who) + ": non-finite argument");
  }
  if (std::abs(z) > kMaxArgument) {
    throw DomainError(std::string(who) + ": |z| exceeds " + std::to_string(kMaxArgument));
  }
}

bool is_positive_real(cplx z) { return z.imag() == 0.0 && z.real() > 0.0; }

double sign_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// J_m(z) by its ascending series; m >= 0.
cplx j_series(int m, cplx z) {
  const cplx half = 0.5 * z;
  cplx lead = 1.0;
  for (int i = 1; i <= m; ++i) lead *= half / static_cast<double>(i);
  if (lead == 0.0) return 0.0;
  const cplx q = -half * half;
  cplx term = 1.0;
  cplx sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(m + k));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

int miller_start(int m, double a) {
  const double top = std::max(static_cast<double>(m), a);
  int start = static_cast<int>(std::ceil(top + 30.0 + 2.0 * std::sqrt(40.0 * top)));
  if (start % 2 != 0) ++start;
  return start;
}

// J_0 .. J_N(z) by Miller's backward recurrence, N >= min_len chosen by the
// start heuristic. Requires Re z >= 0 and z != 0.
std::vector<cplx> miller_sequence(cplx z, int min_len) {
  const int start = std::max(miller_start(min_len, std::abs(z)), min_len + 2);
  std::vector<cplx> f(static_cast<std::size_t>(start) + 2, cplx{0.0});
  // Normalise with e^{iz} when Im z <= 0 (|e^{iz}| >= 1), else e^{-iz}.
  const cplx phase_unit = (z.imag() <= 0.0) ? kI : -kI;
  f[start + 1] = 0.0;
  f[start] = 1e-30;
  auto unit_power = [&](int k) {
    switch (k % 4) {
      case 0: return cplx{1.0};
      case 1: return phase_unit;
      case 2: return cplx{-1.0};
      default: return -phase_unit;
    }
  };
  cplx norm = 2.0 * unit_power(start) * f[start];
  for (int k = start; k >= 1; --k) {
    f[k - 1] = (2.0 * k / z) * f[k] - f[k + 1];
    norm += (k - 1 == 0 ? 1.0 : 2.0) * unit_power(k - 1) * f[k - 1];
    if (std::abs(f[k - 1]) > kRescale) {
      const double s = 1.0 / kRescale;
      for (int j = k - 1; j <= start + 1; ++j) f[j] *= s;
      norm *= s;
    }
  }
  const cplx target = (z.imag() <= 0.0) ? std::exp(kI * z) : std::exp(-kI * z);
  const cplx scale = target / norm;
  for (auto& v : f) v *= scale;
  f.resize(static_cast<std::size_t>(start) + 1);
  return f;
}

struct HankelPair {
  cplx h1;
  cplx h2;
};

// Large-argument expansion of H^(1,2)_nu for nu = 0, 1.
HankelPair hankel_asymptotic(int nu, cplx z) {
  const cplx pre = std::sqrt(2.0 / (kPi * z));
  const cplx chi = z - 0.5 * nu * kPi - 0.25 * kPi;
  const double mu = 4.0 * nu * nu;
  cplx s1 = 1.0, s2 = 1.0;
  cplx term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k) / z;
    const double mag = std::abs(term);
    if (mag > last) break;  // asymptotic series started to diverge
    last = mag;
    cplx ik = 1.0;
    switch (k % 4) {
      case 1: ik = kI; break;
      case 2: ik = -1.0; break;
      case 3: ik = -kI; break;
      default: break;
    }
    s1 += ik * term;
    s2 += std::conj(ik) * term;
    if (mag < 1e-17) break;
  }
  return {pre * std::exp(kI * chi) * s1, pre * std::exp(-kI * chi) * s2};
}

// J_0 .. J_n(z), n >= 0.
std::vector<cplx> j_orders(int n, cplx z) {
  std::vector<cplx> out(static_cast<std::size_t>(n) + 1, cplx{0.0});
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (z.real() < 0.0) {
    auto mirrored = j_orders(n, -z);
    for (int k = 0; k <= n; ++k) out[k] = sign_power(k) * mirrored[k];
    return out;
  }
  const double a = std::abs(z);
  if (a <= kSeriesRadius) {
    for (int k = 0; k <= n; ++k) out[k] = j_series(k, z);
    return out;
  }
  if (a >= kAsymptoticRadius && n < a) {
    const auto h0 = hankel_asymptotic(0, z);
    const auto h1 = hankel_asymptotic(1, z);
    out[0] = 0.5 * (h0.h1 + h0.h2);
    if (n >= 1) out[1] = 0.5 * (h1.h1 + h1.h2);
    for (int k = 1; k < n; ++k) out[k + 1] = (2.0 * k / z) * out[k] - out[k - 1];
    return out;
  }
  auto seq = miller_sequence(z, n);
  for (int k = 0; k <= n; ++k) out[k] = seq[k];
  return out;
}

// Y_0 .. Y_n(z), n >= 0, z != 0.
std::vector<cplx> y_orders(int n, cplx z) {
  std::vector<cplx> out(static_cast<std::size_t>(std::max(n, 1)) + 1, cplx{0.0});
  const double a = std::abs(z);
  if (a >= kAsymptoticRadius && z.real() > 0.0) {
    const auto h0 = hankel_asymptotic(0, z);
    const auto h1 = hankel_asymptotic(1, z);
    out[0] = (h0.h1 - h0.h2) / (2.0 * kI);
    out[1] = (h1.h1 - h1.h2) / (2.0 * kI);
  } else {
    // Neumann series for Y0 and its derivative (-Y1) over a Miller sequence.
    std::vector<cplx> j;
    if (z.real() < 0.0) {
      j = miller_sequence(-z, 2);
      for (std::size_t k = 0; k < j.size(); ++k) j[k] *= sign_power(static_cast<int>(k));
    } else {
      j = miller_sequence(z, 2);
    }
    const int last = static_cast<int>(j.size()) - 1;
    const cplx log_term = std::log(0.5 * z) + kEulerGamma;
    cplx sum0 = 0.0, sum1 = 0.0;
    for (int k = 1; 2 * k + 1 <= last; ++k) {
      const double sgn = sign_power(k);
      sum0 += sgn * j[2 * k] / static_cast<double>(k);
      sum1 += sgn * (j[2 * k - 1] - j[2 * k + 1]) / (2.0 * k);
    }
    out[0] = (2.0 / kPi) * log_term * j[0] - (4.0 / kPi) * sum0;
    const cplx y0_prime = (2.0 / kPi) * (j[0] / z - log_term * j[1]) - (4.0 / kPi) * sum1;
    out[1] = -y0_prime;
  }
  for (int k = 1; k < n; ++k) {
    out[k + 1] = (2.0 * k / z) * out[k] - out[k - 1];
    if (!std::isfinite(out[k + 1].real()) || !std::isfinite(out[k + 1].imag())) {
      throw DomainError("bessel_y: overflow at order " + std::to_string(k + 1) +
                        " for |z| = " + std::to_string(a));
    }
  }
  out.resize(static_cast<std::size_t>(n) + 1);
  return out;
}

cplx checked(cplx v, const char* who) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw DomainError(std::string(who) + ": overflow");
  }
  return v;
}

// Real arguments give real J, Y, j; drop the rounding residue in Im.
cplx finalize(cplx v, cplx z, const char* who) {
  checked(v, who);
  if (z.imag() == 0.0) v.imag(0.0);
  return v;
}

// Orders m-1 and m of J (or Y) for any integer m, using C_{-k} = (-1)^k C_k.
struct OrderPair {
  cplx prev;
  cplx cur;
};

template <class Orders>
OrderPair order_pair(int m, cplx z, Orders&& orders) {
  const int top = std::max(std::abs(m), std::abs(m - 1));
  const auto seq = orders(top, z);
  auto at = [&](int k) { return k >= 0 ? seq[k] : sign_power(k) * seq[-k]; };
  return {at(m - 1), at(m)};
}

}  // namespace

cplx bessel_j(int m, cplx z) {
  check_arguments(m, z, "bessel_j");
  const int am = std::abs(m);
  const auto seq = j_orders(am, z);
  cplx v = seq[am];
  if (m < 0) v *= sign_power(am);
  return finalize(v, z, "bessel_j");
}

cplx bessel_y(int m, cplx z) {
  check_arguments(m, z, "bessel_y");
  if (z == 0.0) throw DomainError("bessel_y: z = 0");
  const int am = std::abs(m);
  const auto seq = y_orders(am, z);
  cplx v = seq[am];
  if (m < 0) v *= sign_power(am);
  return finalize(v, z, "bessel_y");
}

cplx hankel(HankelKind kind, int m, cplx z) {
  check_arguments(m, z, "hankel");
  if (z == 0.0) throw DomainError("hankel: z = 0");
  const cplx j = bessel_j(m, z);
  const cplx y = bessel_y(m, z);
  if (is_positive_real(z)) {
    const cplx h1{j.real(), y.real()};
    return kind == HankelKind::First ? h1 : std::conj(h1);
  }
  return kind == HankelKind::First ? j + kI * y : j - kI * y;
}

cplx bessel_j_derivative(int m, cplx z) {
  check_arguments(m, z, "bessel_j_derivative");
  if (z == 0.0) {
    if (m == 1) return 0.5;
    if (m == -1) return -0.5;
    return 0.0;
  }
  const auto p = order_pair(m, z, j_orders);
  return finalize(p.prev - (static_cast<double>(m) / z) * p.cur, z, "bessel_j_derivative");
}

cplx hankel_derivative(HankelKind kind, int m, cplx z) {
  check_arguments(m, z, "hankel_derivative");
  if (z == 0.0) throw DomainError("hankel_derivative: z = 0");
  const auto pj = order_pair(m, z, j_orders);
  const auto py = order_pair(m, z, y_orders);
  const cplx mz = static_cast<double>(m) / z;
  cplx dj = pj.prev - mz * pj.cur;
  cplx dy = py.prev - mz * py.cur;
  if (is_positive_real(z)) {
    const cplx h1{dj.real(), dy.real()};
    return checked(kind == HankelKind::First ? h1 : std::conj(h1), "hankel_derivative");
  }
  return checked(kind == HankelKind::First ? dj + kI * dy : dj - kI * dy, "hankel_derivative");
}

cplx wronskian_h1h2(int m, double x) {
  if (!(x > 0.0)) throw DomainError("wronskian_h1h2: x must be positive");
  check_arguments(m, x, "wronskian_h1h2");
  // Expanding H1 = J + iY, H2 = J - iY gives W = -2i (J Y' - J' Y). Working
  // with the real components keeps Y * Y' (which cancels) out of the sum, so
  // the identity stays representable where |H|^2 alone would overflow.
  const cplx z{x, 0.0};
  const auto pj = order_pair(m, z, j_orders);
  const auto py = order_pair(m, z, y_orders);
  const double j = pj.cur.real();
  const double y = checked(py.cur, "wronskian_h1h2").real();
  const double dj = pj.prev.real() - m / x * j;
  const double dy = checked(py.prev, "wronskian_h1h2").real() - m / x * y;
  return checked(cplx(0.0, -2.0 * (j * dy - dj * y)), "wronskian_h1h2");
}

cplx sph_bessel(SphericalKind kind, int l, cplx z) {
  if (l < 0) throw DomainError("sph_bessel: negative order");
  check_arguments(l, z, "sph_bessel");
  if (kind == SphericalKind::H1) {
    if (z == 0.0) throw DomainError("sph_bessel: h1 at z = 0");
    const cplx e = std::exp(kI * z);
    cplx prev = -kI * e / z;
    if (l == 0) return checked(prev, "sph_bessel");
    cplx cur = -e * (z + kI) / (z * z);
    for (int k = 1; k < l; ++k) {
      const cplx next = (2.0 * k + 1.0) / z * cur - prev;
      prev = cur;
      cur = next;
      if (!std::isfinite(cur.real()) || !std::isfinite(cur.imag())) {
        throw DomainError("sph_bessel: h1 overflow at order " + std::to_string(k + 1));
      }
    }
    return cur;
  }

  if (z == 0.0) return l == 0 ? 1.0 : 0.0;
  const cplx j0 = std::sin(z) / z;
  if (l == 0) return finalize(j0, z, "sph_bessel");
  const double a = std::abs(z);
  if (a > l) {
    cplx prev = j0;
    cplx cur = std::sin(z) / (z * z) - std::cos(z) / z;
    for (int k = 1; k < l; ++k) {
      const cplx next = (2.0 * k + 1.0) / z * cur - prev;
      prev = cur;
      cur = next;
    }
    return finalize(cur, z, "sph_bessel");
  }
  // Downward recurrence, normalised on j0 (or j1 near a zero of j0).
  const int start = l + 20 + static_cast<int>(std::ceil(std::sqrt(40.0 * (l + 1)) + a));
  cplx next = 0.0;
  cplx cur = 1e-30;
  cplx at_l = 0.0, at_1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const cplx prev = (2.0 * k + 1.0) / z * cur - next;
    next = cur;
    cur = prev;
    if (k - 1 == l) at_l = cur;
    if (k - 1 == 1) at_1 = cur;
    if (std::abs(cur) > kRescale) {
      const double s = 1.0 / kRescale;
      cur *= s;
      next *= s;
      at_l *= s;
      at_1 *= s;
    }
  }
  // cur now holds the unnormalised j0.
  cplx v;
  if (std::abs(j0) > 1e-3 * std::abs(std::sin(z)) || a < 1.0) {
    v = at_l * (j0 / cur);
  } else {
    const cplx j1 = std::sin(z) / (z * z) - std::cos(z) / z;
    v = at_l * (j1 / at_1);
  }
  return finalize(v, z, "sph_bessel");
}

}  // namespace spinrad::specfun
