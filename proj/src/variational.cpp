#include "solotto/variational.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "solotto/errors.hpp"

namespace solotto {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Bracket scanned for the quartic root, in oscillator lengths.
constexpr double kScanMin = 1e-4;
constexpr double kScanMax = 10.0;
constexpr int kScanPoints = 400;

void require_positive_width(double a, const char* where) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    std::ostringstream os;
    os << where << ": width must be positive and finite, got " << a;
    throw Error(ErrorKind::Domain, os.str());
  }
}

void require_positive_particles(double n, const char* where) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    std::ostringstream os;
    os << where << ": particle number must be positive, got " << n;
    throw Error(ErrorKind::Domain, os.str());
  }
}

double quartic(double a, double g, double n) {
  return a * a * a * a - 2.0 * g * n * a / kPi2 - 4.0 / kPi2;
}

}  // namespace

double SolitonParams::amplitude() const { return std::sqrt(particles / (2.0 * width)); }

void SolitonParams::validate() const {
  require_positive_width(width, "SolitonParams");
  require_positive_particles(particles, "SolitonParams");
  if (!std::isfinite(g)) throw Error(ErrorKind::Domain, "SolitonParams: interaction is not finite");
}

EnergyBreakdown ansatz_energy(const SolitonParams& p) {
  p.validate();
  const double a = p.width;
  const double n = p.particles;
  EnergyBreakdown e;
  e.kinetic = n / (6.0 * a * a);
  e.trap = n * kPi2 * a * a / 24.0;
  e.interaction = p.g * n * n / (6.0 * a);
  e.total = e.kinetic + e.trap + e.interaction;
  return e;
}

EnergyBreakdown moving_ansatz_energy(const SolitonParams& p, double velocity) {
  EnergyBreakdown e = ansatz_energy(p);
  e.kinetic += p.particles * kPi2 * velocity * velocity / 24.0;
  e.total = e.kinetic + e.trap + e.interaction;
  return e;
}

double equilibrium_width(double g, double particles) {
  require_positive_particles(particles, "equilibrium_width");
  if (!(g < 0.0)) {
    std::ostringstream os;
    os << "equilibrium_width: interaction must be negative, got " << g;
    throw Error(ErrorKind::Domain, os.str());
  }
  // The quartic is increasing on a > 0 for g < 0, so the first sign change of
  // a log-spaced scan brackets the unique physical root.
  const double ratio = std::pow(kScanMax / kScanMin, 1.0 / (kScanPoints - 1));
  double lo = kScanMin;
  double f_lo = quartic(lo, g, particles);
  for (int i = 1; i < kScanPoints; ++i) {
    const double hi = kScanMin * std::pow(ratio, i);
    const double f_hi = quartic(hi, g, particles);
    if (f_lo == 0.0) return lo;
    if (f_lo < 0.0 && f_hi >= 0.0) {
      if (f_hi == 0.0) return hi;
      std::uintmax_t max_iter = 200;
      auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::abs(x); };
      const auto [l, h] = boost::math::tools::toms748_solve(
          [&](double a) { return quartic(a, g, particles); }, lo, hi, f_lo, f_hi, tol, max_iter);
      return 0.5 * (l + h);
    }
    lo = hi;
    f_lo = f_hi;
  }
  std::ostringstream os;
  os << "equilibrium_width: no sign change of the width quartic in (" << kScanMin << ", "
     << kScanMax << "] for g=" << g << ", N=" << particles;
  throw Error(ErrorKind::NoRoot, os.str());
}

double weak_trap_width(double g, double particles) {
  require_positive_particles(particles, "weak_trap_width");
  if (!(g < 0.0)) {
    std::ostringstream os;
    os << "weak_trap_width: interaction must be negative, got " << g;
    throw Error(ErrorKind::Domain, os.str());
  }
  return -2.0 / (particles * g);
}

double kepler_potential(double width, double g, double particles) {
  require_positive_width(width, "kepler_potential");
  return 2.0 * g * particles / (kPi2 * width) + 2.0 / (kPi2 * width * width);
}

double width_eom_rhs(double width, double g, double particles) {
  require_positive_width(width, "width_eom_rhs");
  const double a2 = width * width;
  return -width + 4.0 / (kPi2 * a2 * width) + 2.0 * g * particles / (kPi2 * a2);
}

double kepler_particle_energy(double width, double velocity, double g, double particles) {
  return 0.5 * velocity * velocity + 0.5 * width * width + kepler_potential(width, g, particles);
}

WidthTrajectory integrate_width_eom(const std::function<double(double)>& g_of_t,
                                    std::span<const double> times, double particles,
                                    double a0, double v0, double max_dt) {
  require_positive_width(a0, "integrate_width_eom");
  require_positive_particles(particles, "integrate_width_eom");
  if (times.empty()) throw Error(ErrorKind::Validation, "integrate_width_eom: empty time grid");
  if (!(max_dt > 0.0)) throw Error(ErrorKind::Validation, "integrate_width_eom: dt must be positive");

  WidthTrajectory out;
  out.times.assign(times.begin(), times.end());
  out.width.reserve(times.size());
  out.velocity.reserve(times.size());

  double a = a0;
  double v = v0;
  out.width.push_back(a);
  out.velocity.push_back(v);

  auto accel = [&](double t, double w) {
    if (!(w > 0.0)) {
      std::ostringstream os;
      os << "integrate_width_eom: soliton width collapsed (a=" << w << ") at t=" << t;
      throw Error(ErrorKind::BlowUp, os.str());
    }
    return width_eom_rhs(w, g_of_t(t), particles);
  };

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t0 = times[k - 1];
    const double span = times[k] - t0;
    if (!(span > 0.0)) throw Error(ErrorKind::Validation, "integrate_width_eom: times must increase");
    const auto steps = static_cast<std::size_t>(std::ceil(span / max_dt - 1e-9));
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t = t0 + static_cast<double>(s) * h;
      const double k1a = v;
      const double k1v = accel(t, a);
      const double k2a = v + 0.5 * h * k1v;
      const double k2v = accel(t + 0.5 * h, a + 0.5 * h * k1a);
      const double k3a = v + 0.5 * h * k2v;
      const double k3v = accel(t + 0.5 * h, a + 0.5 * h * k2a);
      const double k4a = v + h * k3v;
      const double k4v = accel(t + h, a + h * k3a);
      a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!(a > 0.0)) {
        std::ostringstream os;
        os << "integrate_width_eom: soliton width collapsed (a=" << a << ") at t=" << t + h;
        throw Error(ErrorKind::BlowUp, os.str());
      }
    }
    out.width.push_back(a);
    out.velocity.push_back(v);
  }
  return out;
}

}  // namespace solotto
