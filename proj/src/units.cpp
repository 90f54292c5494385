#include "spinrad/units.hpp"

#include <cmath>
#include <numbers>

#include "spinrad/errors.hpp"

namespace spinrad::units {

UnitSystem UnitSystem::si_time_anchor(double t0_seconds) {
  if (!(t0_seconds > 0.0) || !std::isfinite(t0_seconds)) {
    throw DomainError("unit time anchor must be positive and finite");
  }
  return UnitSystem(t0_seconds, true);
}

UnitSystem UnitSystem::si_length_anchor(double r0_meters) {
  if (!(r0_meters > 0.0) || !std::isfinite(r0_meters)) {
    throw DomainError("unit length anchor must be positive and finite");
  }
  return UnitSystem(r0_meters / kSpeedOfLight, true);
}

double UnitSystem::scale(Quantity q) const {
  const double t = t0_;
  switch (q) {
    case Quantity::Length: return kSpeedOfLight * t;
    case Quantity::Time: return t;
    case Quantity::AngularVelocity: return 1.0 / t;
    case Quantity::Temperature: return kHbar / (kBoltzmann * t);
    case Quantity::Energy: return kHbar / t;
    case Quantity::Power: return kHbar / (t * t);
    case Quantity::Torque: return kHbar / t;
    case Quantity::AngularMomentum: return kHbar;
    case Quantity::MomentOfInertia: return kHbar * t;
    case Quantity::Rate: return 1.0 / t;
    case Quantity::Conductivity: return 1.0 / t;
    case Quantity::ConductivitySI: return 4.0 * std::numbers::pi * kEpsilon0 / t;
  }
  return 1.0;
}

const char* si_unit_name(Quantity q) {
  switch (q) {
    case Quantity::Length: return "m";
    case Quantity::Time: return "s";
    case Quantity::AngularVelocity: return "rad/s";
    case Quantity::Temperature: return "K";
    case Quantity::Energy: return "J";
    case Quantity::Power: return "W";
    case Quantity::Torque: return "N m";
    case Quantity::AngularMomentum: return "J s";
    case Quantity::MomentOfInertia: return "kg m^2";
    case Quantity::Rate: return "1/s";
    case Quantity::Conductivity: return "1/s";
    case Quantity::ConductivitySI: return "S/m";
  }
  return "";
}

}  // namespace spinrad::units
