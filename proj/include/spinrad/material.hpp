#pragma once

// Dielectric response, Bose occupation and the small-sphere polarizability.
//
// Everything here is in natural units (hbar = c = k_B = 1). Conductivity is
// Gaussian, so a Drude metal has eps = 1 + 4 pi i sigma / omega with sigma a
// frequency.

#include <complex>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace spinrad::material {

using cplx = std::complex<double>;

struct Vacuum {};

struct Drude {
  double sigma;
};

/// eps = eps_inf + omega_p^2 / (omega_0^2 - omega^2 - i gamma omega)
struct Lorentz {
  double eps_inf;
  double omega_p;
  double omega_0;
  double gamma;
};

/// Frequency-independent eps. The imaginary part flips with sgn(omega) so the
/// model stays Hermitian; eps_im >= 0 is required.
struct ConstantEps {
  double re;
  double im;
};

/// Sampled eps on a strictly increasing grid of omega >= 0. Re eps is
/// interpolated linearly, Im eps linearly in log (positivity preserving) when
/// both neighbours are positive. Negative frequencies use eps(-w) = conj eps(w).
class Tabulated {
 public:
  Tabulated(std::vector<double> omega, std::vector<double> re, std::vector<double> im);

  /// CSV with header "omega,re,im". Throws ParseError with the line number.
  static Tabulated from_csv(std::istream& in);
  static Tabulated from_file(const std::filesystem::path& path);

  cplx operator()(double w) const;
  double omega_min() const { return omega_.front(); }
  double omega_max() const { return omega_.back(); }
  bool lossy() const;

 private:
  std::vector<double> omega_, re_, im_;
};

using DielectricModel = std::variant<Vacuum, Drude, Lorentz, ConstantEps, Tabulated>;

cplx epsilon(const DielectricModel& model, double omega);

/// (eps(omega) - 1) * omega^2. Finite at omega = 0 for every model, which is
/// what the rotating-body formulas need when omega - Omega m crosses zero.
cplx susceptibility_omega2(const DielectricModel& model, double omega);

bool is_lossy(const DielectricModel& model);

std::string describe(const DielectricModel& model);

/// 1 / (exp(omega/T) - 1), continued to omega < 0 as -1 - n(|omega|).
/// T = 0 gives -Theta(-omega). omega = 0 throws DomainError at T = 0 and
/// DivergenceError at T > 0.
double bose_occupation(double omega, double T);

/// (eps - 1)/(eps + shift), evaluated as X/(X + (1 + shift) w^2) so that it stays
/// finite for a conductor at omega = 0 (where it tends to 1). DomainError on
/// the eps = -shift pole.
cplx eps_ratio(const DielectricModel& model, double omega, double shift);

/// R^3 (eps - 1)/(eps + 2); DomainError on the eps = -2 pole.
cplx sphere_polarizability(const DielectricModel& model, double R, double omega);

struct ThermalState {
  double T_object = 0.0;
  double T_env = 0.0;
  double Omega = 0.0;

  void validate() const;
};

}  // namespace spinrad::material
