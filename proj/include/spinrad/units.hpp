#pragma once

// Conversion between SI and the internal natural units (hbar = c = k_B = 1).
//
// With c = 1 a single time anchor t0 fixes every scale: lengths are measured
// in c t0, energies in hbar/t0, temperatures in hbar/(k_B t0). A length anchor
// R0 is accepted and turned into t0 = R0/c.

namespace spinrad::units {

inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kEpsilon0 = 8.8541878128e-12;  // F/m

enum class Quantity {
  Length,           // m
  Time,             // s
  AngularVelocity,  // rad/s
  Temperature,      // K
  Energy,           // J
  Power,            // W
  Torque,           // N m
  AngularMomentum,  // J s
  MomentOfInertia,  // kg m^2
  Rate,             // 1/s
  Conductivity,     // Gaussian conductivity, 1/s
  ConductivitySI,   // S/m, mapped onto the Gaussian value via sigma/(4 pi eps0)
};

class UnitSystem {
 public:
  /// Identity conversion: inputs are already natural.
  static UnitSystem natural() { return UnitSystem(1.0, false); }
  static UnitSystem si_time_anchor(double t0_seconds);
  static UnitSystem si_length_anchor(double r0_meters);

  bool is_si() const { return si_; }
  double time_anchor() const { return t0_; }

  /// SI value of one natural unit of q.
  double scale(Quantity q) const;
  double to_natural(Quantity q, double value) const { return si_ ? value / scale(q) : value; }
  double to_si(Quantity q, double value) const { return si_ ? value * scale(q) : value; }

 private:
  UnitSystem(double t0, bool si) : t0_(t0), si_(si) {}
  double t0_;
  bool si_;
};

const char* si_unit_name(Quantity q);

}  // namespace spinrad::units
