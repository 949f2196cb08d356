#pragma once

// Closed-form physics of the sech soliton ansatz
//   psi(x) = A sech(x / a),  N = 2 a A^2,
// in harmonic-oscillator units (hbar = m = omega = 1).

#include <functional>
#include <span>
#include <vector>

namespace solotto {

struct SolitonParams {
  double width = 0.0;      // a > 0
  double particles = 0.0;  // N > 0
  double g = 0.0;          // interaction strength, < 0 for bright solitons

  double amplitude() const;  // A = sqrt(N / (2a))
  void validate() const;
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double trap = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

/// Energy functional evaluated on the sech ansatz:
///   kinetic N/(6a^2), trap N pi^2 a^2/24, interaction g N^2/(6a).
/// The interaction term uses +g/2 |psi|^4 so that g < 0 lowers the energy;
/// this is the convention the width equation of motion is derived from.
EnergyBreakdown ansatz_energy(const SolitonParams& p);

/// Positive root of a^4 - 2 g N a / pi^2 - 4/pi^2 = 0, i.e. the width at
/// which the ansatz energy (and the Kepler potential) is stationary.
double equilibrium_width(double g, double particles);

/// Weak-trap estimate of the equilibrium width, -2/(N g).
double weak_trap_width(double g, double particles);

/// U(a) = 2 g N / (pi^2 a) + 2 / (pi^2 a^2).
double kepler_potential(double width, double g, double particles);

/// Right-hand side of  a'' = -a + 4/(pi^2 a^3) + 2 g N/(pi^2 a^2).
double width_eom_rhs(double width, double g, double particles);

/// Energy of a chirped sech state moving with width velocity v:
/// the ansatz energy plus the breathing contribution N pi^2 v^2 / 24.
EnergyBreakdown moving_ansatz_energy(const SolitonParams& p, double velocity);

/// Energy of the fictitious Kepler particle, v^2/2 + a^2/2 + U(a).
/// Proportional to moving_ansatz_energy with factor 12/(N pi^2).
double kepler_particle_energy(double width, double velocity, double g, double particles);

struct WidthTrajectory {
  std::vector<double> times;
  std::vector<double> width;
  std::vector<double> velocity;
};

/// Fixed-step RK4 integration of the width equation under a time-dependent
/// interaction. The output is sampled on `times` (uniform or not, increasing,
/// starting at the initial time); each output interval is subdivided into
/// ceil(interval / max_dt) equal steps. Throws ErrorKind::BlowUp if the
/// width reaches zero.
WidthTrajectory integrate_width_eom(const std::function<double(double)>& g_of_t,
                                    std::span<const double> times, double particles,
                                    double a0, double v0, double max_dt);

}  // namespace solotto
