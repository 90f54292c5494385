#pragma once

// Scattering amplitudes of rotating bodies and the sources the radiation
// integrals draw from.
//
// Conventions: omega > 0 is the lab-frame frequency, m the angular momentum
// about the rotation axis, and omega' = omega - Omega m the co-rotating
// frequency at which the material responds. The flux factor of a channel is
// 1 - sum |S|^2 over its row; negative values mean amplification.

#include <array>
#include <complex>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spinrad/material.hpp"

namespace spinrad::scattering {

using cplx = std::complex<double>;
using material::DielectricModel;

enum class Polarization { Scalar, E, M };

struct Kz {
  double value;
  bool operator==(const Kz&) const = default;
};
struct Ell {
  int value;
  bool operator==(const Ell&) const = default;
};
using Extra = std::variant<std::monostate, Kz, Ell>;

struct ModeIndex {
  double omega = 0.0;
  int m = 0;
  Extra extra{};
  Polarization pol = Polarization::Scalar;
};

/// 2x2 block over polarizations, ordered (M, E).
struct Block2 {
  cplx mm{1.0}, me{0.0}, em{0.0}, ee{1.0};
};

/// Exact row sums, or the first-order form -2 Re(S_PP - 1) that drops
/// |S - 1|^2 contributions (the consistent truncation for small bodies).
enum class FluxRule { Exact, LeadingOrder };

struct ChannelAmplitude {
  ModeIndex mode;
  cplx S{1.0};
  std::optional<Block2> block;
  FluxRule rule = FluxRule::Exact;
};

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);
std::string extra_to_string(const Extra& e);

// ---------------------------------------------------------------- disk

/// Interior wavenumber of the rotating disk, omega~^2 = X(omega') + omega^2
/// with X = (eps - 1) omega'^2. Im omega~ carries the sign of omega'.
cplx disk_interior_frequency(const DielectricModel& model, double Omega, double omega, int m);

/// Exact partial-wave amplitude S_m(omega) of a disk of radius R.
/// Throws ResonanceError if the denominator vanishes.
cplx disk_smatrix(const DielectricModel& model, double R, double Omega, double omega, int m);

/// 1 - |S_m|^2 for the disk without cancellation. With p = A J_m(x) - B J'_m(x)
/// and q = A Y_m(x) - B Y'_m(x) the amplitude is -(p - iq)/(p + iq), so the flux
/// factor is 4 Im(p conj q) / |p + iq|^2.
double disk_flux_factor(const DielectricModel& model, double R, double Omega, double omega, int m);

struct SmallVelocity {
  double value;   // |S_1|^2 - 1
  bool warning;   // max(omega, |omega~|) R >= 0.3, outside the small-size regime
};

/// -(pi/8) omega^2 (omega - Omega)^2 R^4 Im eps(omega - Omega), the m = 1 thin-disk limit.
SmallVelocity disk_smatrix_smallvel(const DielectricModel& model, double R, double Omega, double omega);

inline constexpr double kSmallVelocityLimit = 0.3;

// ---------------------------------------------------------------- sphere

/// S_{1mE} = 1 + i (4 omega^3 / 3) alpha(omega - Omega m), m in {-1, 0, 1}.
cplx sphere_smatrix_dipole(const DielectricModel& model, double R, double Omega, double omega, int m);

// ---------------------------------------------------------------- cylinder

/// Dipole-order block of a thin cylinder for |m| = 1 at axial wavenumber kz:
/// S = I + (i pi / 2) beta R^2 [[w^2, w kz], [w kz, kz^2]] with
/// beta = (eps' - 1)/(eps' + 1) at omega' = omega - Omega m.
Block2 cylinder_smatrix_block(const DielectricModel& model, double R, double Omega, double omega,
                              double kz, int m = 1);

/// Flux factor of a channel. For a block the row is chosen by mode.pol
/// (Scalar sums both rows).
double flux_factor(const ChannelAmplitude& ch);

/// Row fluxes (M, E) of a block.
std::array<double, 2> block_row_fluxes(const Block2& b, FluxRule rule);

// ---------------------------------------------------------------- sources

/// One quadrature sub-channel of a group: the radiation integrand is
/// sum weight * g(N) with N built from `flux`.
struct SubChannel {
  double weight;
  double flux;
};

/// A set of channels sharing m that the radiation module integrates together.
struct ChannelGroup {
  int m = 0;
  Extra extra{};
  Polarization pol = Polarization::Scalar;
  std::size_t index = 0;  // source-private
};

class ScatteringSource {
 public:
  virtual ~ScatteringSource() = default;

  virtual std::string name() const = 0;
  /// Channel groups carrying angular momentum m (may be empty).
  virtual std::vector<ChannelGroup> groups(int m) const = 0;
  /// Sub-channels of `g` at lab frequency omega for rotation rate Omega.
  virtual void sample(const ChannelGroup& g, double omega, double Omega,
                      std::vector<SubChannel>& out) const = 0;
  /// Largest |m| with channels, if finite.
  virtual std::optional<int> max_order() const { return std::nullopt; }
  /// Frequencies where the integrand has kinks (table grid nodes).
  virtual std::vector<double> breakpoints(const ChannelGroup&) const { return {}; }
  /// Frequency range over which the group's amplitudes are known.
  virtual std::pair<double, double> support(const ChannelGroup&) const;
  virtual bool lossy() const = 0;
  /// Transverse size used for the Omega R regime flag (0 if unknown).
  virtual double radius() const { return 0.0; }
};

class DiskBody final : public ScatteringSource {
 public:
  DiskBody(DielectricModel model, double R, bool small_velocity = false);
  std::string name() const override { return "disk"; }
  std::vector<ChannelGroup> groups(int m) const override;
  void sample(const ChannelGroup& g, double omega, double Omega,
              std::vector<SubChannel>& out) const override;
  bool lossy() const override { return material::is_lossy(model_); }
  double radius() const override { return R_; }

 private:
  DielectricModel model_;
  double R_;
  bool small_velocity_;
};

class SphereBody final : public ScatteringSource {
 public:
  SphereBody(DielectricModel model, double R, FluxRule rule = FluxRule::LeadingOrder);
  std::string name() const override { return "sphere"; }
  std::vector<ChannelGroup> groups(int m) const override;
  void sample(const ChannelGroup& g, double omega, double Omega,
              std::vector<SubChannel>& out) const override;
  std::optional<int> max_order() const override { return 1; }
  bool lossy() const override { return material::is_lossy(model_); }
  double radius() const override { return R_; }

 private:
  DielectricModel model_;
  double R_;
  FluxRule rule_;
};

/// Thin cylinder of radius R and length L; kz is integrated over
/// [-omega, omega] with the L dkz / 2pi measure by Gauss-Legendre, which is
/// exact for the polynomial kz dependence of the block.
class CylinderBody final : public ScatteringSource {
 public:
  CylinderBody(DielectricModel model, double R, double L, FluxRule rule = FluxRule::LeadingOrder);
  std::string name() const override { return "cylinder"; }
  std::vector<ChannelGroup> groups(int m) const override;
  void sample(const ChannelGroup& g, double omega, double Omega,
              std::vector<SubChannel>& out) const override;
  std::optional<int> max_order() const override { return 1; }
  bool lossy() const override { return material::is_lossy(model_); }
  double radius() const override { return R_; }
  double length() const { return L_; }

 private:
  DielectricModel model_;
  double R_, L_;
  FluxRule rule_;
};

// ---------------------------------------------------------------- tables

/// User-supplied diagonal amplitudes on per-channel frequency grids.
class ChannelTable final : public ScatteringSource {
 public:
  struct Channel {
    int m;
    Extra extra;
    Polarization pol;
    std::vector<double> omega;
    std::vector<cplx> S;
  };

  /// CSV with header "omega,m,extra,pol,ReS,ImS". The extra column is empty,
  /// or an axial wavenumber; a "# extra=l" comment line switches it to an
  /// integer multipole index. Rows of one channel must have strictly
  /// increasing omega. Errors carry the offending line number.
  static ChannelTable from_csv(std::istream& in);
  static ChannelTable from_file(const std::filesystem::path& path);

  explicit ChannelTable(std::vector<Channel> channels);

  std::string name() const override { return "table"; }
  std::vector<ChannelGroup> groups(int m) const override;
  void sample(const ChannelGroup& g, double omega, double Omega,
              std::vector<SubChannel>& out) const override;
  std::optional<int> max_order() const override;
  std::vector<double> breakpoints(const ChannelGroup& g) const override;
  std::pair<double, double> support(const ChannelGroup& g) const override;
  bool lossy() const override;

  const std::vector<Channel>& channels() const { return channels_; }
  /// Linear interpolation of S inside the channel's grid; unitary (S = 1) outside.
  cplx amplitude(std::size_t channel, double omega) const;

 private:
  std::vector<Channel> channels_;
};

}  // namespace spinrad::scattering
