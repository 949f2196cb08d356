#pragma once

#include <array>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "solotto/variational.hpp"

namespace solotto {

inline constexpr std::size_t kDefaultSamples = 1001;

/// One work stroke: ramp g from g_initial to g_final in time `duration`
/// with `particles` atoms in the soliton.
struct StrokeConfig {
  double g_initial = -0.1;
  double g_final = -0.2;
  double particles = 100.0;
  double duration = 0.15;
  std::size_t samples = kDefaultSamples;

  void validate() const;
  double time_at(std::size_t k) const;  // k * T_f / (M - 1)
  std::vector<double> time_grid() const;
};

/// Which widths the quintic trajectory is pinned to at t = 0 and t = T_f.
enum class EndpointWidths {
  ExactQuartic,  // equilibrium_width(g, N): pulse endpoints equal g_i, g_f exactly
  WeakTrap,      // -2/(N g): endpoint g differs from g_i, g_f by the trap correction
};

/// Shape of the time-rescaled adiabatic (TRA) comparison ramp.
enum class TraShape {
  AdiabaticLimit,  // (pi^2 a^4 - 4) / (2 N a) along the same quintic width trajectory
  ReferenceRamp,   // the smooth cosine reference g_c(t)
};

/// a(t) = sum_i c_i t^i, i = 0..5.
struct PolynomialTrajectory {
  std::array<double, 6> coefficients{};
  double duration = 0.0;

  double value(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

enum class PulseKind { Sta, Tra, AdiabaticReference };

std::string_view to_string(PulseKind kind);
PulseKind parse_pulse_kind(std::string_view text);

/// Sampled interaction ramp g(t) and the width trajectory that goes with it.
struct PulseProfile {
  PulseKind kind = PulseKind::Sta;
  std::vector<double> times;
  std::vector<double> g_values;
  std::vector<double> a_values;
  StrokeConfig config;

  double min_abs_gn() const;
};

/// g_c(t) = (g_i+g_f)/2 + 9(g_i-g_f)cos(pi t/T_f)/16 + (g_f-g_i)cos(3 pi t/T_f)/16.
double reference_ramp(const StrokeConfig& cfg, double t);

/// Quintic a(t) with the endpoint widths of `endpoints` and zero first and
/// second derivatives at both ends, from the 6x6 boundary-condition system.
PolynomialTrajectory design_quintic(const StrokeConfig& cfg,
                                    EndpointWidths endpoints = EndpointWidths::ExactQuartic);

/// g(t) = [pi^2 a^2 (a'' + a) - 4/a] / (2N) sampled on the stroke grid.
/// Throws ErrorKind::Breakdown if |g N| <= 1 (or g >= 0) at any sample.
PulseProfile invert_to_pulse(const PolynomialTrajectory& traj, const StrokeConfig& cfg);

/// Same as invert_to_pulse but without the breakdown guard; used where the
/// STA ramp is only needed as a reference (e.g. shortcut-energy bookkeeping).
PulseProfile invert_to_pulse_unchecked(const PolynomialTrajectory& traj, const StrokeConfig& cfg);

PulseProfile sta_pulse(const StrokeConfig& cfg,
                       EndpointWidths endpoints = EndpointWidths::ExactQuartic);

PulseProfile tra_pulse(const StrokeConfig& cfg, TraShape shape = TraShape::AdiabaticLimit,
                       EndpointWidths endpoints = EndpointWidths::ExactQuartic);

/// g_c(t) sampled on the stroke grid with equilibrium widths.
PulseProfile reference_pulse(const StrokeConfig& cfg);

/// Throws ErrorKind::Breakdown naming the first sample with |gN| <= 1.
void check_soliton_regime(const PulseProfile& pulse);

/// Cubic B-spline through the uniformly spaced pulse samples (linear when
/// fewer than five samples are available).
class PulseInterpolant {
 public:
  explicit PulseInterpolant(const PulseProfile& pulse);

  double operator()(double t) const;
  double duration() const { return duration_; }

 private:
  std::optional<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
  std::vector<double> samples_;
  double step_;
  double duration_;
};

/// Width dynamics under a sampled pulse, reported on the pulse grid.
WidthTrajectory integrate_width_eom(const PulseProfile& pulse, double a0, double v0,
                                    double max_dt);

}  // namespace solotto
