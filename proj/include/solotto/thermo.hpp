#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solotto/errors.hpp"
#include "solotto/gpe.hpp"
#include "solotto/pulse.hpp"

namespace solotto {

enum class Protocol { Sta, Tra };
enum class Backend { Gpe, Variational };

/// Second operand of the Bures angle; the first is always the initial
/// ground state of the stroke.
enum class BuresOperand { Target, Dynamical };

/// How the eigenenergy gap between the STA and TRA ramps is accumulated into
/// the shortcut energy: |e_STA - e_TRA| (a non-negative cost) or the signed
/// difference.
enum class ShortcutEnergyMeasure { Absolute, Signed };

std::string_view to_string(Protocol p);
std::string_view to_string(Backend b);
Protocol parse_protocol(std::string_view text);
Backend parse_backend(std::string_view text);

struct SimulationSettings {
  Grid grid{16.0, 1024};
  double dt = 1e-4;
  std::size_t samples = kDefaultSamples;
  std::size_t output_every = 100;
  EndpointWidths endpoints = EndpointWidths::ExactQuartic;
  TraShape tra_shape = TraShape::AdiabaticLimit;
  BuresOperand bures = BuresOperand::Target;
  ShortcutEnergyMeasure shortcut_measure = ShortcutEnergyMeasure::Absolute;
  EigenenergyMode eigenenergy_mode = EigenenergyMode::Variational;
  GroundStateOptions ground_state;
  /// Width-equation step as a fraction of T_f for the variational backend.
  double variational_step_fraction = 1e-4;
};

struct StrokeRecord {
  StrokeConfig config;
  Protocol kind = Protocol::Sta;
  Backend backend = Backend::Gpe;
  double work = 0.0;               // <W> = e(T_f) - e_i
  double adiabatic_work = 0.0;     // <W^AD> = e_target - e_i
  double irreversible_work = 0.0;  // <W> - <W^AD>
  double fidelity = 0.0;           // against the target ground state
  double initial_energy = 0.0;     // e_i
  double final_energy = 0.0;       // e~(T_f)
  double target_energy = 0.0;      // ground-state energy at g_final
  double shortcut_energy = 0.0;    // <E_STA>; NaN when the STA ramp leaves the soliton regime
  double bures_angle = 0.0;
  PulseProfile pulse;
  std::vector<ObservableSample> series;
};

StrokeRecord run_stroke(const StrokeConfig& cfg, Protocol kind, Backend backend,
                        const SimulationSettings& settings = {});

/// Ground-state energy difference e(g_f) - e(g_i) at fixed N.
double adiabatic_work(double g_initial, double g_final, double particles, Backend backend,
                      const SimulationSettings& settings = {});

/// (1/T_f) * integral of the eigenenergy gap between the STA and TRA ramps,
/// trapezoidal on the pulse grid.
double shortcut_energy(const PulseProfile& sta, const PulseProfile& tra,
                       const SimulationSettings& settings = {});

struct CycleConfig {
  double g_initial = -0.1;
  double g_final = -0.2;
  double particles_compression = 100.0;
  double particles_expansion = 90.0;
  double duration = 0.15;  // T_f of each work stroke
  Protocol protocol = Protocol::Sta;

  void validate() const;
  StrokeConfig compression(std::size_t samples) const;
  StrokeConfig expansion(std::size_t samples) const;
};

/// "weak" for (-0.1, -0.2), "strong" for (-0.2, -0.2646), "custom" otherwise.
std::string regime_label(double g_initial, double g_final);

struct QslReport {
  double bures_compression = 0.0;
  double bures_expansion = 0.0;
  double shortcut_energy_compression = 0.0;
  double shortcut_energy_expansion = 0.0;
  double time_compression = 0.0;
  double time_expansion = 0.0;
  double efficiency_bound = 0.0;
  double power_bound = 0.0;
};

struct CycleReport {
  CycleConfig config;
  Backend backend = Backend::Gpe;
  StrokeRecord compression;
  StrokeRecord expansion;
  double work_compression = 0.0;
  double work_expansion = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  double efficiency = 0.0;
  double adiabatic_efficiency = 0.0;
  double power = 0.0;
  double cycle_time = 0.0;
  std::optional<QslReport> qsl;  // empty when the bound is undefined
  /// Energy charged for the control pulses (shortcut energy for STA, zero for TRA).
  double pulse_cost_compression = 0.0;
  double pulse_cost_expansion = 0.0;
  double efficiency_cost = 0.0;
  double power_cost = 0.0;
  bool engine_valid = true;
  std::vector<std::string> flags;
};

/// T^QSL = B / <E_STA> per stroke, then
///   eta_QSL = -(W^AD_C + W^AD_E) / (Q_minus + (B_C + B_E) / tau),
///   P_QSL   = -(W^AD_C + W^AD_E) / (T^QSL_C + T^QSL_E).
/// Throws ErrorKind::UndefinedBound if a shortcut energy is not positive.
QslReport qsl_bounds(const StrokeRecord& compression, const StrokeRecord& expansion,
                     double q_minus, double cycle_time);

struct CostCorrected {
  double efficiency = 0.0;
  double power = 0.0;
};

/// eta_cost = -(W_C + W_E) / (Q_minus + c_C + c_E),
/// P_cost   = -(W_C + W_E + c_C + c_E) / tau, with c the pulse costs.
CostCorrected cost_corrected(const CycleReport& report);

CycleReport run_cycle(const CycleConfig& cfg, Backend backend,
                      const SimulationSettings& settings = {});

struct SweepPoint {
  double duration = 0.0;
  CycleConfig config;
  std::optional<CycleReport> report;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

/// Independent cycles for every T_f, in input order. Failures are recorded
/// per point. `workers` > 1 runs points on a thread pool.
std::vector<SweepPoint> sweep(const CycleConfig& base, std::span<const double> durations,
                              Backend backend, const SimulationSettings& settings = {},
                              std::size_t workers = 1);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

}  // namespace solotto
