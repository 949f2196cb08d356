#pragma once

// Text and binary serialization of pulses, observables, snapshots, stroke
// and cycle summaries, sweeps and run manifests.

#include <filesystem>
#include <iosfwd>
#include "json.hpp"
#include <string>
#include <string_view>
#include <vector>

#include "solotto/gpe.hpp"
#include "solotto/pulse.hpp"
#include "solotto/thermo.hpp"

namespace solotto {

inline constexpr std::string_view kVersion = "1.0.0";

/// Decimal with 17 significant digits; parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// "# kind=STA g_initial=... g_final=... particles=... duration=... samples=..."
/// followed by "t,g,a" and one row per sample.
void write_pulse_csv(std::ostream& os, const PulseProfile& pulse);
PulseProfile read_pulse_csv(std::istream& is);
void write_pulse_csv(const std::filesystem::path& path, const PulseProfile& pulse);
PulseProfile read_pulse_csv(const std::filesystem::path& path);

/// t,norm,energy_total,energy_kinetic,energy_trap,energy_interaction,width_rms,work
void write_observables_csv(std::ostream& os, const std::vector<ObservableSample>& series);
void write_observables_csv(const std::filesystem::path& path,
                           const std::vector<ObservableSample>& series);

/// uint64 n, float64 dx, then n interleaved (re, im) float64, little-endian.
void write_snapshot(std::ostream& os, const WaveFunction& psi);
/// Reconstructs the grid from n and dx; norm_target is set to the stored norm.
WaveFunction read_snapshot(std::istream& is);

/// Column names of the sweep table, in order.
const std::vector<std::string>& sweep_columns();
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

nlohmann::json to_json(const StrokeConfig& cfg);
nlohmann::json to_json(const CycleConfig& cfg);
nlohmann::json to_json(const StrokeRecord& rec);  // scalars only, no series
nlohmann::json to_json(const CycleReport& report);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version{kVersion};
  std::string timestamp;  // UTC ISO-8601
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

/// Current UTC time, or SOURCE_DATE_EPOCH when that variable is set.
std::string utc_timestamp();

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace solotto
