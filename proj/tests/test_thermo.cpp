#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "solotto/errors.hpp"
#include "solotto/io.hpp"
#include "solotto/thermo.hpp"

using namespace solotto;
using doctest::Approx;

namespace {
template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected solotto::Error");
  return ErrorKind::Io;
}

const StrokeConfig kWeak{-0.1, -0.2, 100.0, 0.15};
const StrokeConfig kStrong{-0.2, -0.2646, 100.0, 0.15};

void check_record_invariants(const StrokeRecord& r) {
  CHECK(r.irreversible_work == r.work - r.adiabatic_work);
  CHECK(r.work == r.final_energy - r.initial_energy);
  CHECK(r.adiabatic_work == r.target_energy - r.initial_energy);
  CHECK(r.irreversible_work >= -1e-6 * std::abs(r.adiabatic_work));
  CHECK(r.fidelity >= 0.0);
  CHECK(r.fidelity <= 1.0);
  CHECK(r.bures_angle >= 0.0);
  CHECK(r.bures_angle <= std::numbers::pi / 2);
}
}  // namespace

TEST_CASE("protocol and backend names") {
  CHECK(parse_protocol("sta") == Protocol::Sta);
  CHECK(parse_protocol("TRA") == Protocol::Tra);
  CHECK(parse_backend("variational") == Backend::Variational);
  CHECK(to_string(Backend::Gpe) == "gpe");
  CHECK(kind_of([] { parse_protocol("x"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { parse_backend("x"); }) == ErrorKind::Validation);
}

TEST_CASE("variational stroke: STA is exact, TRA is not") {
  const auto sta = run_stroke(kWeak, Protocol::Sta, Backend::Variational);
  const auto tra = run_stroke(kWeak, Protocol::Tra, Backend::Variational);
  check_record_invariants(sta);
  check_record_invariants(tra);
  CHECK(std::abs(sta.irreversible_work) < 1e-6);
  CHECK(sta.fidelity > 1.0 - 1e-10);
  CHECK(tra.irreversible_work > 1.0);
  CHECK(tra.fidelity < sta.fidelity);
  CHECK(sta.series.size() == kWeak.samples);
  CHECK(std::abs(sta.series.front().work) < 1e-9);
  CHECK(sta.shortcut_energy > 0.0);
  CHECK(sta.shortcut_energy == tra.shortcut_energy);
}

TEST_CASE("GPE stroke, weak regime at T_f = 0.15: STA beats TRA") {
  const auto sta = run_stroke(kWeak, Protocol::Sta, Backend::Gpe);
  const auto tra = run_stroke(kWeak, Protocol::Tra, Backend::Gpe);
  check_record_invariants(sta);
  check_record_invariants(tra);
  CHECK(std::abs(sta.work - sta.adiabatic_work) < std::abs(tra.work - tra.adiabatic_work));
  CHECK(sta.irreversible_work < tra.irreversible_work);
  CHECK(sta.fidelity > tra.fidelity);
  // Regression goldens from this implementation (n = 1024, L = 16, dt = 1e-4).
  CHECK(sta.irreversible_work == Approx(74.1).epsilon(0.01));
  CHECK(tra.irreversible_work == Approx(250.9).epsilon(0.01));
  CHECK(sta.fidelity == Approx(0.989).epsilon(2e-3));
  CHECK(tra.fidelity == Approx(0.953).epsilon(2e-3));
}

TEST_CASE("adiabatic limit: both kinds become reversible") {
  StrokeConfig slow = kWeak;
  slow.duration = 10.0;
  for (auto kind : {Protocol::Sta, Protocol::Tra}) {
    const auto r = run_stroke(slow, kind, Backend::Variational);
    CHECK(std::abs(r.irreversible_work) < 1e-3);
    CHECK(r.fidelity > 0.9999);
  }
  const auto gpe = run_stroke(slow, Protocol::Tra, Backend::Gpe);
  CHECK(gpe.fidelity > 0.999);
  CHECK(std::abs(gpe.irreversible_work) < 0.05);
}

TEST_CASE("adiabatic work") {
  const double weak = adiabatic_work(-0.1, -0.2, 100, Backend::Variational);
  const double strong = adiabatic_work(-0.2, -0.2646, 100, Backend::Variational);
  CHECK(weak == Approx(-1251.2).epsilon(1e-4));
  CHECK(strong == Approx(weak).epsilon(2e-3));
  CHECK(adiabatic_work(-0.1, -0.1, 100, Backend::Gpe) == 0.0);
  const double weak_gpe = adiabatic_work(-0.1, -0.2, 100, Backend::Gpe);
  const double strong_gpe = adiabatic_work(-0.2, -0.2646, 100, Backend::Gpe);
  CHECK(weak_gpe == Approx(weak).epsilon(0.01));
  CHECK(strong_gpe == Approx(strong).epsilon(0.01));
}

TEST_CASE("shortcut energy") {
  const auto sta = sta_pulse(kWeak);
  const auto tra = tra_pulse(kWeak);
  CHECK(shortcut_energy(sta, sta) == 0.0);
  const double e = shortcut_energy(sta, tra);
  CHECK(e > 0.0);
  SimulationSettings signed_settings;
  signed_settings.shortcut_measure = ShortcutEnergyMeasure::Signed;
  const double s = shortcut_energy(sta, tra, signed_settings);
  CHECK(s < 0.0);
  CHECK(std::abs(s) <= e);
  StrokeConfig slow = kWeak;
  slow.duration = 5.0;
  CHECK(shortcut_energy(sta_pulse(slow), tra_pulse(slow)) < 1e-2 * e);
  StrokeConfig other = kWeak;
  other.samples = 11;
  CHECK(kind_of([&] { shortcut_energy(sta, tra_pulse(other)); }) == ErrorKind::Validation);
}

TEST_CASE("cycle config validation and regime labels") {
  CHECK(kind_of([] { CycleConfig{-0.1, -0.2, 90, 100, 0.1}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { CycleConfig{-0.1, -0.1, 100, 90, 0.1}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { CycleConfig{-0.001, -0.2, 100, 90, 0.1}.validate(); }) ==
        ErrorKind::Validation);
  CHECK(kind_of([] { CycleConfig{-0.1, -0.2, 100, 90, -1}.validate(); }) == ErrorKind::Validation);
  CHECK(regime_label(-0.1, -0.2) == "weak");
  CHECK(regime_label(-0.2, -0.2646) == "strong");
  CHECK(regime_label(-0.3, -0.2) == "custom");
  const CycleConfig c{-0.1, -0.2, 100, 90, 0.3};
  CHECK(c.compression(11).particles == 100);
  CHECK(c.expansion(11).g_initial == -0.2);
  CHECK(c.expansion(11).particles == 90);
}

TEST_CASE("variational cycle in the adiabatic limit") {
  for (auto [gi, gf, eta_ad] : {std::tuple{-0.1, -0.2, 0.74963034183154797},
                                std::tuple{-0.2, -0.2646, 0.42864}}) {
    const auto r = run_cycle({gi, gf, 100, 90, 10.0, Protocol::Sta}, Backend::Variational);
    CHECK(r.engine_valid);
    CHECK(r.adiabatic_efficiency == Approx(eta_ad).epsilon(1e-4));
    CHECK(r.efficiency == Approx(r.adiabatic_efficiency).epsilon(1e-8));
    const double closure = r.work_compression + r.work_expansion + r.q_minus + r.q_plus;
    CHECK(std::abs(closure) < 1e-9 * std::abs(r.q_minus));
    CHECK(r.cycle_time == 20.0);
    CHECK(r.power == Approx(-(r.work_compression + r.work_expansion) / 20.0));
    REQUIRE(r.qsl.has_value());
    CHECK(r.efficiency_cost <= r.efficiency);
    CHECK(r.power_cost <= r.power);
    CHECK(r.efficiency_cost == Approx(r.efficiency).epsilon(1e-3));
  }
}

TEST_CASE("quantum speed limit bounds") {
  StrokeRecord c, e;
  c.adiabatic_work = -1250.0;
  e.adiabatic_work = 900.0;
  c.bures_angle = 0.4;
  e.bures_angle = 0.4;
  c.shortcut_energy = 2.0;
  e.shortcut_energy = 4.0;
  const double q = 450.0;
  const auto r = qsl_bounds(c, e, q, 1.0);
  CHECK(r.time_compression == Approx(0.2));
  CHECK(r.time_expansion == Approx(0.1));
  CHECK(r.efficiency_bound == Approx(350.0 / (450.0 + 0.8)));
  CHECK(r.power_bound == Approx(350.0 / 0.3));
  CHECK(qsl_bounds(c, e, q, 1e12).efficiency_bound == Approx(350.0 / 450.0).epsilon(1e-10));
  c.bures_angle = 0.0;
  CHECK(qsl_bounds(c, e, q, 1.0).time_compression == 0.0);
  c.shortcut_energy = 0.0;
  CHECK(kind_of([&] { qsl_bounds(c, e, q, 1.0); }) == ErrorKind::UndefinedBound);
  c.shortcut_energy = -1.0;
  CHECK(kind_of([&] { qsl_bounds(c, e, q, 1.0); }) == ErrorKind::UndefinedBound);
}

TEST_CASE("cost correction") {
  CycleReport r;
  r.work_compression = -1250.0;
  r.work_expansion = 900.0;
  r.q_minus = 450.0;
  r.cycle_time = 2.0;
  r.efficiency = 350.0 / 450.0;
  r.power = 175.0;
  auto zero = cost_corrected(r);
  CHECK(zero.efficiency == Approx(r.efficiency));
  CHECK(zero.power == Approx(r.power));
  r.pulse_cost_compression = 10.0;
  r.pulse_cost_expansion = 20.0;
  const auto cc = cost_corrected(r);
  CHECK(cc.efficiency == Approx(350.0 / 480.0));
  CHECK(cc.power == Approx(320.0 / 2.0));
  CHECK(cc.efficiency < r.efficiency);
  CHECK(cc.power < r.power);
}

TEST_CASE("TRA cycles carry no pulse cost; STA cycles do") {
  const auto sta = run_cycle({-0.1, -0.2, 100, 90, 0.5, Protocol::Sta}, Backend::Variational);
  const auto tra = run_cycle({-0.1, -0.2, 100, 90, 0.5, Protocol::Tra}, Backend::Variational);
  CHECK(sta.pulse_cost_compression == sta.compression.shortcut_energy);
  CHECK(sta.efficiency_cost < sta.efficiency);
  CHECK(tra.pulse_cost_compression == 0.0);
  CHECK(tra.efficiency_cost == tra.efficiency);
}

TEST_CASE("cycle flags: breakdown of the expansion reference and engine validity") {
  const auto r = run_cycle({-0.1, -0.2, 100, 90, 0.05, Protocol::Tra}, Backend::Variational);
  auto has = [&](std::string_view f) {
    return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
  };
  CHECK(has("shortcut-energy-undefined"));
  CHECK(has("qsl-undefined"));
  CHECK_FALSE(r.qsl.has_value());
  CHECK(has("engine-invalid"));
  CHECK_FALSE(r.engine_valid);
}

TEST_CASE("sweep: ordering, per-point errors, parallel determinism") {
  const CycleConfig base{-0.1, -0.2, 100, 90, 0.15, Protocol::Sta};
  const auto durations = log_spaced(0.05, 5.0, 40);
  REQUIRE(durations.size() == 40);
  CHECK(durations.front() == 0.05);
  CHECK(durations.back() == 5.0);
  const auto serial = sweep(base, durations, Backend::Variational);
  const auto parallel = sweep(base, durations, Backend::Variational, {}, 3);
  REQUIRE(serial.size() == 40);
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].duration == durations[i]);
  CHECK_FALSE(serial[0].report.has_value());
  CHECK(serial[0].error_kind == ErrorKind::Breakdown);
  CHECK(serial[1].report.has_value());
  std::ostringstream a, b;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  const std::string text = a.str();
  CHECK(text == b.str());
  CHECK(std::count(text.begin(), text.end(), '\n') == 41);

  const std::vector<double> unsorted{0.2, 0.1};
  CHECK(kind_of([&] { sweep(base, unsorted, Backend::Variational); }) == ErrorKind::Validation);
  const std::vector<double> none;
  CHECK(kind_of([&] { sweep(base, none, Backend::Variational); }) == ErrorKind::Validation);
}

TEST_CASE("sweep: TRA weak efficiency rises monotonically with T_f") {
  const CycleConfig base{-0.1, -0.2, 100, 90, 0.15, Protocol::Tra};
  const auto pts = sweep(base, log_spaced(0.05, 5.0, 20), Backend::Variational);
  double prev = -1e300;
  for (const auto& p : pts) {
    REQUIRE(p.report.has_value());
    CHECK(p.report->efficiency >= prev - 1e-3);
    prev = p.report->efficiency;
  }
  CHECK(prev == Approx(0.7496).epsilon(1e-3));
}

TEST_CASE("GPE: STA outperforms TRA from T_f = 0.15 in both regimes") {
  for (auto [gi, gf] : {std::pair{-0.1, -0.2}, std::pair{-0.2, -0.2646}}) {
    for (double tf : {0.15, 0.3}) {
      const auto sta = run_cycle({gi, gf, 100, 90, tf, Protocol::Sta}, Backend::Gpe);
      const auto tra = run_cycle({gi, gf, 100, 90, tf, Protocol::Tra}, Backend::Gpe);
      CHECK(sta.efficiency >= tra.efficiency);
      CHECK(sta.efficiency / sta.adiabatic_efficiency <= 1.0 + 1e-6);
    }
  }
}

TEST_CASE("GPE: STA strong-coupling power peaks at an interior T_f") {
  const CycleConfig base{-0.2, -0.2646, 100, 90, 0.1, Protocol::Sta};
  const auto pts = sweep(base, log_spaced(0.03, 0.15, 7), Backend::Gpe);
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(pts[i].report.has_value());
    if (pts[i].report->power > pts[best].report->power) best = i;
  }
  CHECK(best > 0);
  CHECK(best + 1 < pts.size());
}

TEST_CASE("backend consistency of adiabatic quantities") {
  for (auto [gi, gf] : {std::pair{-0.1, -0.2}, std::pair{-0.2, -0.2646}}) {
    const CycleConfig cfg{gi, gf, 100, 90, 2.0, Protocol::Sta};
    const auto v = run_cycle(cfg, Backend::Variational);
    const auto g = run_cycle(cfg, Backend::Gpe);
    CHECK(g.compression.adiabatic_work == Approx(v.compression.adiabatic_work).epsilon(0.01));
    CHECK(std::abs(g.adiabatic_efficiency - v.adiabatic_efficiency) < 0.02);
  }
}
