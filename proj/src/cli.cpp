#include "solotto/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "solotto/errors.hpp"
#include "solotto/io.hpp"
#include "solotto/thermo.hpp"

namespace solotto {

namespace {

namespace fs = std::filesystem;

struct Params {
  double gi = -0.1;
  double gf = -0.2;
  double n = 100.0;
  double nc = 100.0;
  double ne = 90.0;
  double tf = 0.15;
  std::string kind = "sta";
  std::string backend = "gpe";
  std::size_t grid_n = 1024;
  double grid_l = 16.0;
  double dt = 1e-4;
  std::size_t samples = kDefaultSamples;
  std::size_t parallel = 1;
  std::size_t output_every = 100;
  std::string out = ".";
  std::string config;
  double tf_min = 0.05;
  double tf_max = 5.0;
  std::size_t points = 40;
  std::string bures = "target";
  std::string tra_shape = "adiabatic";
  std::string endpoints = "quartic";
};

struct Binding {
  std::string name;
  CLI::Option* option = nullptr;
  std::function<void(const std::string&)> assign;
  std::function<nlohmann::json()> value;
};

template <typename T>
T parse_value(const std::string& name, const std::string& text) {
  T v{};
  if (!CLI::detail::lexical_cast(text, v)) {
    throw Error(ErrorKind::Validation, "config: bad value '" + text + "' for '" + name + "'");
  }
  return v;
}

template <typename T>
void bind_option(CLI::App* app, std::vector<Binding>& out, const std::string& name, T& target,
          const std::string& help) {
  Binding b;
  b.name = name;
  b.option = app->add_option("--" + name, target, help)->capture_default_str();
  b.assign = [&target, name](const std::string& text) { target = parse_value<T>(name, text); };
  b.value = [&target]() { return nlohmann::json(target); };
  out.push_back(std::move(b));
}

std::string strip_quotes(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

/// Flat "key = value" (or "key value") lines; '#' and ';' start comments,
/// "[section]" lines are ignored. Keys use flag names with '-' or '_'.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = CLI::detail::trim_copy(line);
    if (line.empty() || line.front() == '[') continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find_first_of(" \t");
    if (sep == std::string::npos) {
      throw Error(ErrorKind::Validation,
                  "config file '" + path + "' line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = CLI::detail::trim_copy(line.substr(0, sep));
    std::string value = strip_quotes(CLI::detail::trim_copy(line.substr(sep + 1)));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    kv[key] = value;
  }
  return kv;
}

void apply_config(const std::vector<Binding>& bindings, const std::string& path) {
  auto kv = read_config_file(path);
  for (const auto& b : bindings) {
    const auto it = kv.find(b.name);
    if (it == kv.end()) continue;
    if (b.option->count() == 0) b.assign(it->second);
    kv.erase(it);
  }
  if (!kv.empty()) {
    throw Error(ErrorKind::Validation,
                "config file '" + path + "': unknown key '" + kv.begin()->first + "'");
  }
}

nlohmann::json merged_config(const std::vector<Binding>& bindings) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& b : bindings) {
    if (b.name == "config" || b.name == "out") continue;
    j[b.name] = b.value();
  }
  return j;
}

SimulationSettings make_settings(const Params& p) {
  SimulationSettings s;
  s.grid = Grid::make(p.grid_l, p.grid_n);
  if (!(p.dt > 0.0)) throw Error(ErrorKind::Validation, "--dt must be positive");
  s.dt = p.dt;
  s.samples = p.samples;
  s.output_every = p.output_every;
  if (p.bures == "target") {
    s.bures = BuresOperand::Target;
  } else if (p.bures == "dynamical") {
    s.bures = BuresOperand::Dynamical;
  } else {
    throw Error(ErrorKind::Validation, "--bures must be target|dynamical");
  }
  if (p.tra_shape == "adiabatic") {
    s.tra_shape = TraShape::AdiabaticLimit;
  } else if (p.tra_shape == "reference") {
    s.tra_shape = TraShape::ReferenceRamp;
  } else {
    throw Error(ErrorKind::Validation, "--tra-shape must be adiabatic|reference");
  }
  if (p.endpoints == "quartic") {
    s.endpoints = EndpointWidths::ExactQuartic;
  } else if (p.endpoints == "weak-trap") {
    s.endpoints = EndpointWidths::WeakTrap;
  } else {
    throw Error(ErrorKind::Validation, "--endpoints must be quartic|weak-trap");
  }
  return s;
}

StrokeConfig make_stroke(const Params& p) {
  StrokeConfig c{p.gi, p.gf, p.n, p.tf, p.samples};
  c.validate();
  return c;
}

CycleConfig make_cycle(const Params& p) {
  CycleConfig c{p.gi, p.gf, p.nc, p.ne, p.tf, parse_protocol(p.kind)};
  c.validate();
  return c;
}

fs::path prepare_out(const Params& p) {
  const fs::path dir(p.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::Io, "cannot create output directory '" + p.out + "'");
  }
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const nlohmann::json& config,
                    std::vector<std::string> outputs) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.timestamp = utc_timestamp();
  outputs.emplace_back("manifest.json");
  m.outputs = std::move(outputs);
  write_json(dir / "manifest.json", m.to_json());
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int cmd_design(const Params& p, const nlohmann::json& config, std::ostream& out) {
  const auto cfg = make_stroke(p);
  const auto s = make_settings(p);
  const auto sta = sta_pulse(cfg, s.endpoints);
  const auto tra = tra_pulse(cfg, s.tra_shape, s.endpoints);
  const auto dir = prepare_out(p);
  write_pulse_csv(dir / "pulse_sta.csv", sta);
  write_pulse_csv(dir / "pulse_tra.csv", tra);
  write_manifest(dir, "design", config, {"pulse_sta.csv", "pulse_tra.csv"});
  out << "design: STA g(0)=" << format_double(sta.g_values.front())
      << " g(T_f)=" << format_double(sta.g_values.back())
      << " min|gN|=" << format_double(sta.min_abs_gn()) << "; wrote " << (dir / "pulse_sta.csv").string()
      << ", " << (dir / "pulse_tra.csv").string() << '\n';
  return 0;
}

int cmd_stroke(const Params& p, const nlohmann::json& config, std::ostream& out) {
  const auto cfg = make_stroke(p);
  const auto s = make_settings(p);
  const auto rec = run_stroke(cfg, parse_protocol(p.kind), parse_backend(p.backend), s);
  const auto dir = prepare_out(p);
  const std::string pulse_name = "pulse_" + std::string(to_string(rec.kind)) + ".csv";
  write_pulse_csv(dir / pulse_name, rec.pulse);
  write_observables_csv(dir / "observables.csv", rec.series);
  write_json(dir / "summary.json", to_json(rec));
  write_manifest(dir, "stroke", config, {pulse_name, "observables.csv", "summary.json"});
  out << "stroke " << to_string(rec.kind) << " (" << to_string(rec.backend)
      << "): W=" << format_double(rec.work) << " W_AD=" << format_double(rec.adiabatic_work)
      << " W_irr=" << format_double(rec.irreversible_work)
      << " F=" << format_double(rec.fidelity) << '\n';
  return 0;
}

int cmd_cycle(const Params& p, const nlohmann::json& config, std::ostream& out) {
  const auto cfg = make_cycle(p);
  const auto s = make_settings(p);
  const auto r = run_cycle(cfg, parse_backend(p.backend), s);
  const auto dir = prepare_out(p);
  write_observables_csv(dir / "observables_compression.csv", r.compression.series);
  write_observables_csv(dir / "observables_expansion.csv", r.expansion.series);
  write_json(dir / "summary.json", to_json(r));
  write_manifest(dir, "cycle", config,
                 {"observables_compression.csv", "observables_expansion.csv", "summary.json"});
  out << "cycle " << to_string(cfg.protocol) << " (" << to_string(r.backend)
      << "): eta=" << format_double(r.efficiency)
      << " eta_AD=" << format_double(r.adiabatic_efficiency) << " P=" << format_double(r.power);
  if (r.qsl) {
    out << " eta_QSL=" << format_double(r.qsl->efficiency_bound)
        << " P_QSL=" << format_double(r.qsl->power_bound);
  }
  for (const auto& f : r.flags) out << " [" << f << ']';
  out << '\n';
  return 0;
}

int cmd_sweep(const Params& p, const nlohmann::json& config, std::ostream& out) {
  const auto base = make_cycle(p);
  const auto s = make_settings(p);
  if (!(p.tf_min > 0.0) || !(p.tf_max > p.tf_min) || p.points < 2) {
    throw Error(ErrorKind::Validation, "sweep: require 0 < tf-min < tf-max and points >= 2");
  }
  if (p.parallel == 0) throw Error(ErrorKind::Validation, "--parallel must be >= 1");
  const auto durations = log_spaced(p.tf_min, p.tf_max, p.points);
  const auto points = sweep(base, durations, parse_backend(p.backend), s, p.parallel);
  const auto dir = prepare_out(p);
  write_sweep_csv(dir / "sweep.csv", points);
  nlohmann::json summary = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& pt : points) {
    if (pt.report) {
      summary.push_back({{"duration", pt.duration}, {"report", to_json(*pt.report)}});
    } else {
      ++failed;
      summary.push_back({{"duration", pt.duration},
                         {"error",
                          {{"kind", pt.error_kind ? std::string(to_string(*pt.error_kind))
                                                  : std::string("unknown")},
                           {"message", pt.error}}}});
    }
  }
  write_json(dir / "summary.json", summary);
  write_manifest(dir, "sweep", config, {"sweep.csv", "summary.json"});
  out << "sweep: " << points.size() << " points, " << failed << " failed; wrote "
      << (dir / "sweep.csv").string() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bright-soliton quantum Otto engine: pulse design, strokes, cycles, sweeps",
               "solotto"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Params p;
  struct Sub {
    CLI::App* app;
    std::vector<Binding> bindings;
  };
  std::vector<Sub> subs;
  auto add_sub = [&](const std::string& name, const std::string& help, bool cycle, bool sweep) {
    Sub sub{app.add_subcommand(name, help), {}};
    auto* a = sub.app;
    auto& b = sub.bindings;
    bind_option(a, b, "gi", p.gi, "initial interaction g_i");
    bind_option(a, b, "gf", p.gf, "final interaction g_f");
    if (cycle) {
      bind_option(a, b, "nc", p.nc, "particles in the compression stroke");
      bind_option(a, b, "ne", p.ne, "particles in the expansion stroke");
    } else {
      bind_option(a, b, "n", p.n, "particles N");
    }
    if (!sweep) bind_option(a, b, "tf", p.tf, "stroke duration T_f");
    bind_option(a, b, "kind", p.kind, "protocol: sta|tra");
    b.back().option->check(CLI::IsMember({"sta", "tra"}));
    if (name != "design") {
      bind_option(a, b, "backend", p.backend, "dynamics: gpe|variational");
      b.back().option->check(CLI::IsMember({"gpe", "variational"}));
    }
    bind_option(a, b, "grid-n", p.grid_n, "grid points (power of two)");
    bind_option(a, b, "grid-l", p.grid_l, "box length");
    bind_option(a, b, "dt", p.dt, "time step");
    bind_option(a, b, "samples", p.samples, "pulse samples M");
    bind_option(a, b, "output-every", p.output_every, "observable stride in steps");
    bind_option(a, b, "bures", p.bures, "Bures angle operand: target|dynamical");
    bind_option(a, b, "tra-shape", p.tra_shape, "TRA ramp: adiabatic|reference");
    bind_option(a, b, "endpoints", p.endpoints, "quintic endpoint widths: quartic|weak-trap");
    if (sweep) {
      bind_option(a, b, "tf-min", p.tf_min, "smallest T_f");
      bind_option(a, b, "tf-max", p.tf_max, "largest T_f");
      bind_option(a, b, "points", p.points, "number of log-spaced T_f values");
      bind_option(a, b, "parallel", p.parallel, "worker threads");
    }
    bind_option(a, b, "out", p.out, "output directory");
    bind_option(a, b, "config", p.config, "flat key = value config file");
    subs.push_back(std::move(sub));
  };
  add_sub("design", "write STA and TRA pulse profiles", false, false);
  add_sub("stroke", "run one work stroke", false, false);
  add_sub("cycle", "run one Otto cycle", true, false);
  add_sub("sweep", "run cycles over log-spaced T_f", true, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error[" << to_string(ErrorKind::Validation) << "]: " << one_line(e.what()) << '\n';
    return exit_code(ErrorKind::Validation);
  }

  try {
    for (const auto& sub : subs) {
      if (!sub.app->parsed()) continue;
      if (!p.config.empty()) apply_config(sub.bindings, p.config);
      const auto config = merged_config(sub.bindings);
      const std::string name = sub.app->get_name();
      if (name == "design") return cmd_design(p, config, out);
      if (name == "stroke") return cmd_stroke(p, config, out);
      if (name == "cycle") return cmd_cycle(p, config, out);
      return cmd_sweep(p, config, out);
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << one_line(e.what()) << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << one_line(e.what()) << '\n';
    return 3;
  }
  return exit_code(ErrorKind::Validation);
}

}  // namespace solotto
