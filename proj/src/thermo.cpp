#include "solotto/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace solotto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double bures_from_fidelity(double f) { return std::acos(std::sqrt(std::clamp(f, 0.0, 1.0))); }

PulseProfile design_pulse(const StrokeConfig& cfg, Protocol kind, const SimulationSettings& s) {
  return kind == Protocol::Sta ? sta_pulse(cfg, s.endpoints)
                               : tra_pulse(cfg, s.tra_shape, s.endpoints);
}

// NaN when the STA reference ramp is not a valid soliton ramp at every sample.
double stroke_shortcut_energy(const StrokeConfig& cfg, Protocol kind, const PulseProfile& pulse,
                              const SimulationSettings& s) {
  try {
    const PulseProfile sta = kind == Protocol::Sta
                                 ? pulse
                                 : invert_to_pulse_unchecked(design_quintic(cfg, s.endpoints), cfg);
    const PulseProfile tra = kind == Protocol::Tra ? pulse : tra_pulse(cfg, s.tra_shape, s.endpoints);
    return shortcut_energy(sta, tra, s);
  } catch (const Error&) {
    return kNaN;
  }
}

void finish_record(StrokeRecord& rec) {
  rec.work = rec.final_energy - rec.initial_energy;
  rec.adiabatic_work = rec.target_energy - rec.initial_energy;
  rec.irreversible_work = rec.work - rec.adiabatic_work;
}

StrokeRecord run_gpe_stroke(StrokeRecord rec, const SimulationSettings& s) {
  const StrokeConfig& cfg = rec.config;
  const GpeSolver solver(s.grid);
  const auto initial = solver.ground_state(cfg.g_initial, cfg.particles, s.ground_state);
  const auto target = solver.ground_state(cfg.g_final, cfg.particles, s.ground_state);

  EvolutionOptions opts;
  opts.dt = s.dt;
  opts.output_every = s.output_every;
  auto evo = solver.evolve(initial.psi, rec.pulse, opts);

  rec.initial_energy = initial.energy.total;
  rec.target_energy = target.energy.total;
  rec.final_energy = evo.series.back().energy.total;
  rec.fidelity = fidelity(evo.final_state, target.psi);
  rec.bures_angle = s.bures == BuresOperand::Target
                        ? bures_from_fidelity(fidelity(initial.psi, target.psi))
                        : bures_from_fidelity(fidelity(initial.psi, evo.final_state));
  rec.series = std::move(evo.series);
  finish_record(rec);
  return rec;
}

StrokeRecord run_variational_stroke(StrokeRecord rec, const SimulationSettings& s) {
  const StrokeConfig& cfg = rec.config;
  const double n = cfg.particles;
  const double a_initial = equilibrium_width(cfg.g_initial, n);
  const double a_target = equilibrium_width(cfg.g_final, n);
  const auto traj =
      integrate_width_eom(rec.pulse, a_initial, 0.0, cfg.duration * s.variational_step_fraction);

  rec.initial_energy = moving_ansatz_energy({a_initial, n, cfg.g_initial}, 0.0).total;
  rec.target_energy = moving_ansatz_energy({a_target, n, cfg.g_final}, 0.0).total;

  const double rms_per_width = std::numbers::pi / std::sqrt(12.0);
  rec.series.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    ObservableSample o;
    o.t = traj.times[k];
    o.norm = n;
    o.energy = moving_ansatz_energy({traj.width[k], n, rec.pulse.g_values[k]}, traj.velocity[k]);
    o.width_rms = rms_per_width * traj.width[k];
    o.work = o.energy.total - rec.initial_energy;
    rec.series.push_back(o);
  }
  rec.final_energy = rec.series.back().energy.total;

  const double a_end = traj.width.back();
  const double chirp = traj.velocity.back() / (2.0 * a_end);
  const auto initial = WaveFunction::sech(s.grid, a_initial, n);
  const auto target = WaveFunction::sech(s.grid, a_target, n);
  const auto final_state = WaveFunction::sech(s.grid, a_end, n, chirp);
  rec.fidelity = fidelity(final_state, target);
  rec.bures_angle = s.bures == BuresOperand::Target
                        ? bures_from_fidelity(fidelity(initial, target))
                        : bures_from_fidelity(fidelity(initial, final_state));
  finish_record(rec);
  return rec;
}

}  // namespace

std::string_view to_string(Protocol p) { return p == Protocol::Sta ? "sta" : "tra"; }
std::string_view to_string(Backend b) { return b == Backend::Gpe ? "gpe" : "variational"; }

Protocol parse_protocol(std::string_view text) {
  if (text == "sta" || text == "STA") return Protocol::Sta;
  if (text == "tra" || text == "TRA") return Protocol::Tra;
  throw Error(ErrorKind::Validation, "unknown protocol '" + std::string(text) + "' (sta|tra)");
}

Backend parse_backend(std::string_view text) {
  if (text == "gpe") return Backend::Gpe;
  if (text == "variational") return Backend::Variational;
  throw Error(ErrorKind::Validation,
              "unknown backend '" + std::string(text) + "' (gpe|variational)");
}

double shortcut_energy(const PulseProfile& sta, const PulseProfile& tra,
                       const SimulationSettings& settings) {
  if (sta.times.size() != tra.times.size() || sta.times.size() < 2) {
    throw Error(ErrorKind::Validation, "shortcut_energy: pulses must share a sample grid");
  }
  const double n = sta.config.particles;
  std::vector<double> gap(sta.times.size());
  for (std::size_t k = 0; k < gap.size(); ++k) {
    const double e_sta =
        instantaneous_eigenenergy(sta.g_values[k], n, settings.eigenenergy_mode, settings.grid);
    const double e_tra =
        instantaneous_eigenenergy(tra.g_values[k], n, settings.eigenenergy_mode, settings.grid);
    gap[k] = e_sta - e_tra;
    if (settings.shortcut_measure == ShortcutEnergyMeasure::Absolute) gap[k] = std::abs(gap[k]);
  }
  double integral = 0.0;
  for (std::size_t k = 1; k < gap.size(); ++k) {
    integral += 0.5 * (gap[k] + gap[k - 1]) * (sta.times[k] - sta.times[k - 1]);
  }
  return integral / sta.config.duration;
}

StrokeRecord run_stroke(const StrokeConfig& cfg, Protocol kind, Backend backend,
                        const SimulationSettings& settings) {
  cfg.validate();
  StrokeRecord rec;
  rec.config = cfg;
  rec.kind = kind;
  rec.backend = backend;
  rec.pulse = design_pulse(cfg, kind, settings);
  rec.shortcut_energy = stroke_shortcut_energy(cfg, kind, rec.pulse, settings);
  return backend == Backend::Gpe ? run_gpe_stroke(std::move(rec), settings)
                                 : run_variational_stroke(std::move(rec), settings);
}

double adiabatic_work(double g_initial, double g_final, double particles, Backend backend,
                      const SimulationSettings& settings) {
  if (g_initial == g_final) return 0.0;
  if (backend == Backend::Variational) {
    return instantaneous_eigenenergy(g_final, particles, EigenenergyMode::Variational) -
           instantaneous_eigenenergy(g_initial, particles, EigenenergyMode::Variational);
  }
  const GpeSolver solver(settings.grid);
  return solver.ground_state(g_final, particles, settings.ground_state).energy.total -
         solver.ground_state(g_initial, particles, settings.ground_state).energy.total;
}

void CycleConfig::validate() const {
  std::ostringstream os;
  if (!(particles_compression > particles_expansion) || !(particles_expansion > 0.0)) {
    os << "cycle: require N_C > N_E > 0 (N_C=" << particles_compression
       << ", N_E=" << particles_expansion << ")";
  } else if (!(g_initial < 0.0) || !(g_final < 0.0) || g_initial == g_final) {
    os << "cycle: interactions must be distinct and negative (g_i=" << g_initial
       << ", g_f=" << g_final << ")";
  } else if (std::min(std::abs(g_initial), std::abs(g_final)) * particles_expansion <= 1.0) {
    os << "cycle: |g N| must exceed 1 for both particle numbers (min |g| N_E = "
       << std::min(std::abs(g_initial), std::abs(g_final)) * particles_expansion << ")";
  } else if (!(duration > 0.0)) {
    os << "cycle: stroke duration must be positive, got " << duration;
  } else {
    return;
  }
  throw Error(ErrorKind::Validation, os.str());
}

StrokeConfig CycleConfig::compression(std::size_t samples) const {
  return {g_initial, g_final, particles_compression, duration, samples};
}

StrokeConfig CycleConfig::expansion(std::size_t samples) const {
  return {g_final, g_initial, particles_expansion, duration, samples};
}

std::string regime_label(double g_initial, double g_final) {
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-12; };
  if (near(g_initial, -0.1) && near(g_final, -0.2)) return "weak";
  if (near(g_initial, -0.2) && near(g_final, -0.2646)) return "strong";
  return "custom";
}

QslReport qsl_bounds(const StrokeRecord& compression, const StrokeRecord& expansion,
                     double q_minus, double cycle_time) {
  const double e_c = compression.shortcut_energy;
  const double e_e = expansion.shortcut_energy;
  if (!(e_c > 0.0) || !(e_e > 0.0)) {
    std::ostringstream os;
    os << "qsl_bounds: shortcut energies must be positive (compression " << e_c << ", expansion "
       << e_e << ")";
    throw Error(ErrorKind::UndefinedBound, os.str());
  }
  if (!(cycle_time > 0.0)) throw Error(ErrorKind::Validation, "qsl_bounds: cycle time must be positive");
  QslReport q;
  q.bures_compression = compression.bures_angle;
  q.bures_expansion = expansion.bures_angle;
  q.shortcut_energy_compression = e_c;
  q.shortcut_energy_expansion = e_e;
  q.time_compression = q.bures_compression / e_c;
  q.time_expansion = q.bures_expansion / e_e;
  const double adiabatic_output = -(compression.adiabatic_work + expansion.adiabatic_work);
  q.efficiency_bound =
      adiabatic_output / (q_minus + (q.bures_compression + q.bures_expansion) / cycle_time);
  q.power_bound = adiabatic_output / (q.time_compression + q.time_expansion);
  return q;
}

CostCorrected cost_corrected(const CycleReport& r) {
  const double work = r.work_compression + r.work_expansion;
  const double cost = r.pulse_cost_compression + r.pulse_cost_expansion;
  return {-work / (r.q_minus + cost), -(work + cost) / r.cycle_time};
}

CycleReport run_cycle(const CycleConfig& cfg, Backend backend, const SimulationSettings& settings) {
  cfg.validate();
  CycleReport r;
  r.config = cfg;
  r.backend = backend;
  r.compression = run_stroke(cfg.compression(settings.samples), cfg.protocol, backend, settings);
  r.expansion = run_stroke(cfg.expansion(settings.samples), cfg.protocol, backend, settings);

  const StrokeRecord& c = r.compression;
  const StrokeRecord& e = r.expansion;
  r.work_compression = c.work;
  r.work_expansion = e.work;
  // Particle exchange at fixed g: the new state is the ground state with the
  // new particle number.
  r.q_minus = e.initial_energy - c.final_energy;
  r.q_plus = c.initial_energy - e.final_energy;
  r.cycle_time = 2.0 * cfg.duration;

  const double output = -(r.work_compression + r.work_expansion);
  r.efficiency = output / r.q_minus;
  r.power = output / r.cycle_time;
  const double q_minus_adiabatic = e.initial_energy - c.target_energy;
  r.adiabatic_efficiency = -(c.adiabatic_work + e.adiabatic_work) / q_minus_adiabatic;

  r.engine_valid = output > 0.0 && r.q_minus > 0.0;
  if (!r.engine_valid) r.flags.emplace_back("engine-invalid");

  if (!std::isfinite(c.shortcut_energy) || !std::isfinite(e.shortcut_energy)) {
    r.flags.emplace_back("shortcut-energy-undefined");
  } else if (c.shortcut_energy + e.shortcut_energy < 0.0) {
    r.flags.emplace_back("negative-shortcut-energy");
  }

  try {
    r.qsl = qsl_bounds(c, e, r.q_minus, r.cycle_time);
    if (r.efficiency > r.qsl->efficiency_bound + 1e-9) r.flags.emplace_back("efficiency-above-qsl");
    if (r.power > r.qsl->power_bound + 1e-9) r.flags.emplace_back("power-above-qsl");
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::UndefinedBound) throw;
    r.flags.emplace_back("qsl-undefined");
  }

  if (cfg.protocol == Protocol::Sta) {
    r.pulse_cost_compression = c.shortcut_energy;
    r.pulse_cost_expansion = e.shortcut_energy;
  }
  const auto cc = cost_corrected(r);
  r.efficiency_cost = cc.efficiency;
  r.power_cost = cc.power;
  return r;
}

std::vector<SweepPoint> sweep(const CycleConfig& base, std::span<const double> durations,
                              Backend backend, const SimulationSettings& settings,
                              std::size_t workers) {
  if (durations.empty()) throw Error(ErrorKind::Validation, "sweep: no T_f values given");
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (!(durations[i] > 0.0) || (i > 0 && !(durations[i] > durations[i - 1]))) {
      throw Error(ErrorKind::Validation, "sweep: T_f values must be positive and increasing");
    }
  }

  std::vector<SweepPoint> points(durations.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      SweepPoint& p = points[i];
      p.duration = durations[i];
      p.config = base;
      p.config.duration = durations[i];
      try {
        p.report = run_cycle(p.config, backend, settings);
      } catch (const Error& e) {
        p.error_kind = e.kind();
        p.error = e.what();
      } catch (const std::exception& e) {
        p.error = e.what();
      }
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, durations.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return points;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (n == 0 || !(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorKind::Validation, "log_spaced: need n >= 1 and 0 < lo <= hi");
  }
  if (n == 1) return {lo};
  std::vector<double> v(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace solotto
