#include "solotto/pulse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "solotto/errors.hpp"

namespace solotto {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

// |g N| at or below this value invalidates the sech ansatz.
constexpr double kBreakdownThreshold = 1.0;

double endpoint_width(double g, double n, EndpointWidths endpoints) {
  return endpoints == EndpointWidths::ExactQuartic ? equilibrium_width(g, n)
                                                   : weak_trap_width(g, n);
}

double inverted_interaction(double a, double acc, double n) {
  return (kPi2 * a * a * (acc + a) - 4.0 / a) / (2.0 * n);
}

double adiabatic_interaction(double a, double n) {
  return (kPi2 * a * a * a * a - 4.0) / (2.0 * n * a);
}

}  // namespace

void StrokeConfig::validate() const {
  std::ostringstream os;
  if (!std::isfinite(g_initial) || !std::isfinite(g_final) || !(g_initial < 0.0) ||
      !(g_final < 0.0)) {
    os << "stroke: interactions must be strictly negative (g_initial=" << g_initial
       << ", g_final=" << g_final << ")";
  } else if (g_initial == g_final) {
    os << "stroke: g_initial and g_final must differ (both " << g_initial << ")";
  } else if (!(particles > 0.0) || !std::isfinite(particles)) {
    os << "stroke: particle number must be positive, got " << particles;
  } else if (!(duration > 0.0) || !std::isfinite(duration)) {
    os << "stroke: duration T_f must be positive, got " << duration;
  } else if (samples < 2) {
    os << "stroke: at least 2 samples required, got " << samples;
  } else {
    return;
  }
  throw Error(ErrorKind::Validation, os.str());
}

double StrokeConfig::time_at(std::size_t k) const {
  if (k + 1 == samples) return duration;
  return static_cast<double>(k) * duration / static_cast<double>(samples - 1);
}

std::vector<double> StrokeConfig::time_grid() const {
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) t[k] = time_at(k);
  return t;
}

double PolynomialTrajectory::value(double t) const {
  double r = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) r = r * t + *it;
  return r;
}

double PolynomialTrajectory::velocity(double t) const {
  double r = 0.0;
  for (int i = 5; i >= 1; --i) r = r * t + i * coefficients[i];
  return r;
}

double PolynomialTrajectory::acceleration(double t) const {
  double r = 0.0;
  for (int i = 5; i >= 2; --i) r = r * t + i * (i - 1) * coefficients[i];
  return r;
}

std::string_view to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::Sta: return "STA";
    case PulseKind::Tra: return "TRA";
    case PulseKind::AdiabaticReference: return "ADIABATIC_REFERENCE";
  }
  return "UNKNOWN";
}

PulseKind parse_pulse_kind(std::string_view text) {
  if (text == "STA" || text == "sta") return PulseKind::Sta;
  if (text == "TRA" || text == "tra") return PulseKind::Tra;
  if (text == "ADIABATIC_REFERENCE" || text == "reference") return PulseKind::AdiabaticReference;
  throw Error(ErrorKind::Validation, "unknown pulse kind '" + std::string(text) + "'");
}

double PulseProfile::min_abs_gn() const {
  double m = std::numeric_limits<double>::infinity();
  for (double g : g_values) m = std::min(m, std::abs(g * config.particles));
  return m;
}

double reference_ramp(const StrokeConfig& cfg, double t) {
  if (!(t >= 0.0 && t <= cfg.duration)) {
    std::ostringstream os;
    os << "reference_ramp: t=" << t << " outside [0, " << cfg.duration << "]";
    throw Error(ErrorKind::Domain, os.str());
  }
  const double gi = cfg.g_initial;
  const double gf = cfg.g_final;
  const double phase = kPi * t / cfg.duration;
  return 0.5 * (gi + gf) + 9.0 * (gi - gf) * std::cos(phase) / 16.0 +
         (gf - gi) * std::cos(3.0 * phase) / 16.0;
}

PolynomialTrajectory design_quintic(const StrokeConfig& cfg, EndpointWidths endpoints) {
  cfg.validate();
  const double tf = cfg.duration;
  const double a_start = endpoint_width(cfg.g_initial, cfg.particles, endpoints);
  const double a_end = endpoint_width(cfg.g_final, cfg.particles, endpoints);

  // Rows: a(0), a'(0), a''(0), a(T), a'(T), a''(T).
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  for (int i = 0; i < 6; ++i) {
    m(3, i) = std::pow(tf, i);
    if (i >= 1) m(4, i) = i * std::pow(tf, i - 1);
    if (i >= 2) m(5, i) = i * (i - 1) * std::pow(tf, i - 2);
  }
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << a_start, 0.0, 0.0, a_end, 0.0, 0.0;

  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::Singular, "design_quintic: boundary-condition system is singular");
  }
  const Eigen::Matrix<double, 6, 1> c = lu.solve(rhs);

  PolynomialTrajectory traj;
  traj.duration = tf;
  for (int i = 0; i < 6; ++i) traj.coefficients[i] = c(i);
  return traj;
}

PulseProfile invert_to_pulse_unchecked(const PolynomialTrajectory& traj, const StrokeConfig& cfg) {
  cfg.validate();
  PulseProfile p;
  p.kind = PulseKind::Sta;
  p.config = cfg;
  p.times = cfg.time_grid();
  p.g_values.resize(cfg.samples);
  p.a_values.resize(cfg.samples);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    const double t = p.times[k];
    const double a = traj.value(t);
    if (!(a > 0.0)) {
      std::ostringstream os;
      os << "invert_to_pulse: width trajectory is non-positive (a=" << a << ") at t=" << t;
      throw Error(ErrorKind::Domain, os.str());
    }
    p.a_values[k] = a;
    p.g_values[k] = inverted_interaction(a, traj.acceleration(t), cfg.particles);
  }
  return p;
}

PulseProfile invert_to_pulse(const PolynomialTrajectory& traj, const StrokeConfig& cfg) {
  PulseProfile p = invert_to_pulse_unchecked(traj, cfg);
  check_soliton_regime(p);
  return p;
}

PulseProfile sta_pulse(const StrokeConfig& cfg, EndpointWidths endpoints) {
  return invert_to_pulse(design_quintic(cfg, endpoints), cfg);
}

PulseProfile tra_pulse(const StrokeConfig& cfg, TraShape shape, EndpointWidths endpoints) {
  cfg.validate();
  PulseProfile p;
  p.kind = PulseKind::Tra;
  p.config = cfg;
  p.times = cfg.time_grid();
  p.g_values.resize(cfg.samples);
  p.a_values.resize(cfg.samples);
  if (shape == TraShape::ReferenceRamp) {
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      p.g_values[k] = reference_ramp(cfg, p.times[k]);
      p.a_values[k] = equilibrium_width(p.g_values[k], cfg.particles);
    }
  } else {
    // Along a_p(t) the adiabatic interaction solves the width quartic exactly,
    // so a_values are the equilibrium widths of g_values.
    const PolynomialTrajectory traj = design_quintic(cfg, endpoints);
    for (std::size_t k = 0; k < cfg.samples; ++k) {
      const double a = traj.value(p.times[k]);
      p.a_values[k] = a;
      p.g_values[k] = adiabatic_interaction(a, cfg.particles);
    }
  }
  check_soliton_regime(p);
  return p;
}

PulseProfile reference_pulse(const StrokeConfig& cfg) {
  PulseProfile p = tra_pulse(cfg, TraShape::ReferenceRamp);
  p.kind = PulseKind::AdiabaticReference;
  return p;
}

void check_soliton_regime(const PulseProfile& pulse) {
  const double n = pulse.config.particles;
  for (std::size_t k = 0; k < pulse.g_values.size(); ++k) {
    const double g = pulse.g_values[k];
    if (!(g < 0.0) || std::abs(g * n) <= kBreakdownThreshold) {
      std::ostringstream os;
      os.precision(6);
      os << to_string(pulse.kind) << " pulse leaves the soliton regime: |gN|=" << std::abs(g * n)
         << " <= " << kBreakdownThreshold << " (g=" << g << ") at t=" << pulse.times[k]
         << " for T_f=" << pulse.config.duration;
      throw Error(ErrorKind::Breakdown, os.str());
    }
  }
}

PulseInterpolant::PulseInterpolant(const PulseProfile& pulse)
    : samples_(pulse.g_values), duration_(pulse.times.empty() ? 0.0 : pulse.times.back()) {
  if (samples_.size() < 2 || pulse.times.size() != samples_.size()) {
    throw Error(ErrorKind::Validation, "PulseInterpolant: need at least two matching samples");
  }
  step_ = duration_ / static_cast<double>(samples_.size() - 1);
  if (samples_.size() >= 5) spline_.emplace(samples_.data(), samples_.size(), 0.0, step_);
}

double PulseInterpolant::operator()(double t) const {
  t = std::clamp(t, 0.0, duration_);
  if (t == 0.0) return samples_.front();
  if (t == duration_) return samples_.back();
  if (spline_) return (*spline_)(t);
  const double x = t / step_;
  const auto i = std::min(static_cast<std::size_t>(x), samples_.size() - 2);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * samples_[i] + w * samples_[i + 1];
}

WidthTrajectory integrate_width_eom(const PulseProfile& pulse, double a0, double v0,
                                    double max_dt) {
  const PulseInterpolant g(pulse);
  return integrate_width_eom(std::cref(g), pulse.times, pulse.config.particles, a0, v0, max_dt);
}

}  // namespace solotto
