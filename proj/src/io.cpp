#include "solotto/io.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "solotto/errors.hpp"

namespace solotto {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  return is;
}

void check_stream(const std::ostream& os, std::string_view what) {
  if (!os) throw Error(ErrorKind::Io, std::string(what) + ": write failed");
}

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(bytes, 8);
}

template <typename T>
T get_le(std::istream& is) {
  static_assert(sizeof(T) == 8);
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) {
    throw Error(ErrorKind::Io, "snapshot: unexpected end of data");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Io, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_pulse_csv(std::ostream& os, const PulseProfile& pulse) {
  const auto& c = pulse.config;
  os << "# kind=" << to_string(pulse.kind) << " g_initial=" << format_double(c.g_initial)
     << " g_final=" << format_double(c.g_final) << " particles=" << format_double(c.particles)
     << " duration=" << format_double(c.duration) << " samples=" << c.samples << '\n';
  os << "t,g,a\n";
  for (std::size_t k = 0; k < pulse.times.size(); ++k) {
    os << format_double(pulse.times[k]) << ',' << format_double(pulse.g_values[k]) << ','
       << format_double(pulse.a_values[k]) << '\n';
  }
  check_stream(os, "pulse csv");
}

PulseProfile read_pulse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw Error(ErrorKind::Io, "pulse csv: missing '# kind=...' header");
  }
  std::map<std::string, std::string, std::less<>> header;
  for (auto field : split(std::string_view(line).substr(2), ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    header.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
  }
  auto get = [&](std::string_view key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) {
      throw Error(ErrorKind::Io, "pulse csv: header lacks '" + std::string(key) + "'");
    }
    return it->second;
  };

  PulseProfile p;
  p.kind = parse_pulse_kind(get("kind"));
  p.config.g_initial = parse_double(get("g_initial"));
  p.config.g_final = parse_double(get("g_final"));
  p.config.particles = parse_double(get("particles"));
  p.config.duration = parse_double(get("duration"));
  p.config.samples = static_cast<std::size_t>(parse_double(get("samples")));

  if (!std::getline(is, line) || trim(line) != "t,g,a") {
    throw Error(ErrorKind::Io, "pulse csv: expected column line 't,g,a'");
  }
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 3) throw Error(ErrorKind::Io, "pulse csv: bad row '" + line + "'");
    p.times.push_back(parse_double(cols[0]));
    p.g_values.push_back(parse_double(cols[1]));
    p.a_values.push_back(parse_double(cols[2]));
  }
  if (p.times.size() != p.config.samples) {
    throw Error(ErrorKind::Io, "pulse csv: " + std::to_string(p.times.size()) +
                                   " rows but samples=" + std::to_string(p.config.samples));
  }
  return p;
}

void write_pulse_csv(const std::filesystem::path& path, const PulseProfile& pulse) {
  auto os = open_out(path);
  write_pulse_csv(os, pulse);
}

PulseProfile read_pulse_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_pulse_csv(is);
}

void write_observables_csv(std::ostream& os, const std::vector<ObservableSample>& series) {
  os << "t,norm,energy_total,energy_kinetic,energy_trap,energy_interaction,width_rms,work\n";
  for (const auto& o : series) {
    os << format_double(o.t) << ',' << format_double(o.norm) << ','
       << format_double(o.energy.total) << ',' << format_double(o.energy.kinetic) << ','
       << format_double(o.energy.trap) << ',' << format_double(o.energy.interaction) << ','
       << format_double(o.width_rms) << ',' << format_double(o.work) << '\n';
  }
  check_stream(os, "observables csv");
}

void write_observables_csv(const std::filesystem::path& path,
                           const std::vector<ObservableSample>& series) {
  auto os = open_out(path);
  write_observables_csv(os, series);
}

void write_snapshot(std::ostream& os, const WaveFunction& psi) {
  put_le<std::uint64_t>(os, psi.amplitudes.size());
  put_le<double>(os, psi.grid.dx());
  for (const auto& z : psi.amplitudes) {
    put_le<double>(os, z.real());
    put_le<double>(os, z.imag());
  }
  check_stream(os, "snapshot");
}

WaveFunction read_snapshot(std::istream& is) {
  const auto n = get_le<std::uint64_t>(is);
  const auto dx = get_le<double>(is);
  if (n == 0 || n > (std::uint64_t{1} << 32) || !(dx > 0.0)) {
    throw Error(ErrorKind::Io, "snapshot: invalid header");
  }
  WaveFunction psi;
  psi.grid = Grid::make(dx * static_cast<double>(n), static_cast<std::size_t>(n));
  psi.amplitudes.resize(n);
  for (auto& z : psi.amplitudes) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    z = {re, im};
  }
  psi.norm_target = psi.norm();
  return psi;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "T_f",  "protocol", "regime", "W_C",    "W_E",     "Q_minus", "Q_plus",
      "eta",  "eta_AD",   "P",      "eta_QSL", "P_QSL",  "eta_cost", "P_cost",
      "F_C",  "F_E",      "Wirr_C", "Wirr_E", "status"};
  return cols;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : points) {
    os << format_double(p.duration) << ',' << to_string(p.config.protocol) << ','
       << regime_label(p.config.g_initial, p.config.g_final);
    if (!p.report) {
      os << ',';
      for (int i = 0; i < 15; ++i) os << format_double(nan) << ',';
      os << "error:" << (p.error_kind ? to_string(*p.error_kind) : std::string_view("unknown"))
         << '\n';
      continue;
    }
    const auto& r = *p.report;
    const double eta_qsl = r.qsl ? r.qsl->efficiency_bound : nan;
    const double p_qsl = r.qsl ? r.qsl->power_bound : nan;
    const double values[] = {r.work_compression,
                             r.work_expansion,
                             r.q_minus,
                             r.q_plus,
                             r.efficiency,
                             r.adiabatic_efficiency,
                             r.power,
                             eta_qsl,
                             p_qsl,
                             r.efficiency_cost,
                             r.power_cost,
                             r.compression.fidelity,
                             r.expansion.fidelity,
                             r.compression.irreversible_work,
                             r.expansion.irreversible_work};
    for (double v : values) os << ',' << format_double(v);
    os << ',';
    if (r.flags.empty()) {
      os << "ok";
    } else {
      for (std::size_t i = 0; i < r.flags.size(); ++i) os << (i ? ";" : "") << r.flags[i];
    }
    os << '\n';
  }
  check_stream(os, "sweep csv");
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  auto os = open_out(path);
  write_sweep_csv(os, points);
}

nlohmann::json to_json(const StrokeConfig& cfg) {
  return {{"g_initial", cfg.g_initial},
          {"g_final", cfg.g_final},
          {"particles", cfg.particles},
          {"duration", cfg.duration},
          {"samples", cfg.samples}};
}

nlohmann::json to_json(const CycleConfig& cfg) {
  return {{"g_initial", cfg.g_initial},
          {"g_final", cfg.g_final},
          {"particles_compression", cfg.particles_compression},
          {"particles_expansion", cfg.particles_expansion},
          {"duration", cfg.duration},
          {"protocol", std::string(to_string(cfg.protocol))}};
}

nlohmann::json to_json(const StrokeRecord& rec) {
  return {{"config", to_json(rec.config)},
          {"kind", std::string(to_string(rec.kind))},
          {"backend", std::string(to_string(rec.backend))},
          {"work", number(rec.work)},
          {"adiabatic_work", number(rec.adiabatic_work)},
          {"irreversible_work", number(rec.irreversible_work)},
          {"fidelity", number(rec.fidelity)},
          {"initial_energy", number(rec.initial_energy)},
          {"final_energy", number(rec.final_energy)},
          {"target_energy", number(rec.target_energy)},
          {"shortcut_energy", number(rec.shortcut_energy)},
          {"bures_angle", number(rec.bures_angle)},
          {"min_abs_gn", number(rec.pulse.min_abs_gn())}};
}

nlohmann::json to_json(const CycleReport& r) {
  nlohmann::json j = {{"config", to_json(r.config)},
                      {"backend", std::string(to_string(r.backend))},
                      {"regime", regime_label(r.config.g_initial, r.config.g_final)},
                      {"compression", to_json(r.compression)},
                      {"expansion", to_json(r.expansion)},
                      {"work_compression", number(r.work_compression)},
                      {"work_expansion", number(r.work_expansion)},
                      {"q_minus", number(r.q_minus)},
                      {"q_plus", number(r.q_plus)},
                      {"efficiency", number(r.efficiency)},
                      {"adiabatic_efficiency", number(r.adiabatic_efficiency)},
                      {"power", number(r.power)},
                      {"cycle_time", number(r.cycle_time)},
                      {"pulse_cost_compression", number(r.pulse_cost_compression)},
                      {"pulse_cost_expansion", number(r.pulse_cost_expansion)},
                      {"efficiency_cost", number(r.efficiency_cost)},
                      {"power_cost", number(r.power_cost)},
                      {"engine_valid", r.engine_valid},
                      {"flags", r.flags}};
  if (r.qsl) {
    const auto& q = *r.qsl;
    j["qsl"] = {{"bures_compression", number(q.bures_compression)},
                {"bures_expansion", number(q.bures_expansion)},
                {"shortcut_energy_compression", number(q.shortcut_energy_compression)},
                {"shortcut_energy_expansion", number(q.shortcut_energy_expansion)},
                {"time_compression", number(q.time_compression)},
                {"time_expansion", number(q.time_expansion)},
                {"efficiency_bound", number(q.efficiency_bound)},
                {"power_bound", number(q.power_bound)}};
  } else {
    j["qsl"] = nullptr;
  }
  return j;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"config", config},
          {"version", version},
          {"timestamp", timestamp},
          {"outputs", outputs}};
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    long long secs = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), secs);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) t = static_cast<std::time_t>(secs);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  check_stream(os, path.string());
}

}  // namespace solotto
