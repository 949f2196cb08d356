#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "solotto/errors.hpp"
#include "solotto/io.hpp"

using namespace solotto;

namespace {
template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected solotto::Error");
  return ErrorKind::Validation;
}
}  // namespace

TEST_CASE("number formatting round-trips bit-exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(100.0) == "100");
  CHECK(std::isnan(parse_double(format_double(std::numeric_limits<double>::quiet_NaN()))));
  CHECK(kind_of([] { parse_double("1.5x"); }) == ErrorKind::Io);
}

TEST_CASE("pulse csv round trip") {
  for (const auto& p : {sta_pulse({-0.1, -0.2, 100.0, 0.15}),
                        tra_pulse({-0.2, -0.1, 90.0, 0.7, 33}, TraShape::ReferenceRamp)}) {
    std::stringstream ss;
    write_pulse_csv(ss, p);
    const auto text = ss.str();
    CHECK(text.rfind("# kind=", 0) == 0);
    CHECK(text.find("\nt,g,a\n") != std::string::npos);
    const auto q = read_pulse_csv(ss);
    CHECK(q.kind == p.kind);
    CHECK(q.config.g_initial == p.config.g_initial);
    CHECK(q.config.g_final == p.config.g_final);
    CHECK(q.config.particles == p.config.particles);
    CHECK(q.config.duration == p.config.duration);
    CHECK(q.config.samples == p.config.samples);
    CHECK(q.times == p.times);
    CHECK(q.g_values == p.g_values);
    CHECK(q.a_values == p.a_values);
  }
}

TEST_CASE("pulse csv rejects malformed input") {
  std::istringstream no_header("t,g,a\n0,1,2\n");
  CHECK(kind_of([&] { read_pulse_csv(no_header); }) == ErrorKind::Io);
  std::istringstream short_rows(
      "# kind=STA g_initial=-0.1 g_final=-0.2 particles=100 duration=1 samples=3\nt,g,a\n0,1,2\n");
  CHECK(kind_of([&] { read_pulse_csv(short_rows); }) == ErrorKind::Io);
  CHECK(kind_of([] { read_pulse_csv(std::filesystem::path("/nonexistent/x.csv")); }) ==
        ErrorKind::Io);
}

TEST_CASE("observables csv layout") {
  std::vector<ObservableSample> s(2);
  s[1].t = 0.5;
  s[1].norm = 100.0;
  s[1].energy = {1.0, 2.0, -4.0, -1.0};
  s[1].width_rms = 0.25;
  s[1].work = 3.0;
  std::ostringstream os;
  write_observables_csv(os, s);
  CHECK(os.str() ==
        "t,norm,energy_total,energy_kinetic,energy_trap,energy_interaction,width_rms,work\n"
        "0,0,0,0,0,0,0,0\n"
        "0.5,100,-1,1,2,-4,0.25,3\n");
}

TEST_CASE("binary snapshot round trip and layout") {
  const Grid grid{8.0, 16};
  auto psi = WaveFunction::sech(grid, 0.5, 10.0, 0.3);
  std::stringstream ss;
  write_snapshot(ss, psi);
  const std::string bytes = ss.str();
  REQUIRE(bytes.size() == 8 + 8 + 16 * 16);
  CHECK(static_cast<unsigned char>(bytes[0]) == 16);
  for (int i = 1; i < 8; ++i) CHECK(bytes[i] == 0);
  const auto back = read_snapshot(ss);
  CHECK(back.grid == grid);
  CHECK(back.amplitudes == psi.amplitudes);
  std::istringstream truncated(bytes.substr(0, 40));
  CHECK(kind_of([&] { read_snapshot(truncated); }) == ErrorKind::Io);
}

TEST_CASE("sweep csv columns") {
  const auto& cols = sweep_columns();
  const std::vector<std::string> expected{
      "T_f", "protocol", "regime", "W_C",     "W_E",    "Q_minus", "Q_plus",
      "eta", "eta_AD",   "P",      "eta_QSL", "P_QSL",  "eta_cost", "P_cost",
      "F_C", "F_E",      "Wirr_C", "Wirr_E",  "status"};
  CHECK(cols == expected);
  SweepPoint failed;
  failed.duration = 0.05;
  failed.error_kind = ErrorKind::Breakdown;
  std::ostringstream os;
  write_sweep_csv(os, {failed});
  const auto text = os.str();
  const auto row = text.substr(text.find('\n') + 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 18);
  CHECK(row.find("error:soliton-breakdown") != std::string::npos);
  CHECK(row.rfind("0.050000000000000003,sta,weak,", 0) == 0);
}

TEST_CASE("json summaries and manifest") {
  const auto rec = run_stroke({-0.1, -0.2, 100.0, 0.5}, Protocol::Sta, Backend::Variational);
  const auto j = to_json(rec);
  CHECK(j["kind"] == "sta");
  CHECK(j["backend"] == "variational");
  CHECK(j["adiabatic_work"].get<double>() == rec.adiabatic_work);
  RunManifest m;
  m.command = "stroke";
  m.config = {{"gi", -0.1}};
  m.outputs = {"a.csv"};
  m.timestamp = "2000-01-01T00:00:00Z";
  const auto mj = m.to_json();
  CHECK(mj["version"] == std::string(kVersion));
  CHECK(mj["outputs"][0] == "a.csv");
}

TEST_CASE("timestamp honours SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  CHECK(utc_timestamp() == "1970-01-02T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(utc_timestamp().size() == 20);
}
