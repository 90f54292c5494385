#pragma once

// Adaptive Gauss-Kronrod (10/21 point) integration of vector-valued
// integrands on finite intervals. The rule is open, so integrands with a
// removable singularity at an endpoint are never evaluated there.
//
// Bisection always splits the panel whose worst component is furthest from
// its tolerance; ties go to the leftmost panel, which makes the panel set, and
// hence the result, a pure function of the integrand.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spinrad::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_segments = 2000;
};

struct Result {
  std::vector<double> value;
  std::vector<double> error;
  int evaluations = 0;
  int segments = 0;
  bool converged = false;
};

/// f(x, out) writes dim components into out.
using VectorIntegrand = std::function<void(double, std::span<double>)>;

Result integrate(const VectorIntegrand& f, std::size_t dim, double a, double b,
                 const Options& opt = {});

/// Scalar convenience wrapper.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

/// Fixed n-point Gauss-Legendre nodes and weights on [-1, 1], n in {4, 8, 16}.
struct GaussLegendre {
  std::span<const double> nodes;
  std::span<const double> weights;
};
GaussLegendre gauss_legendre(int n);

}  // namespace spinrad::quad
