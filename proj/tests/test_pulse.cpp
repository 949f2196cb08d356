#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "solotto/errors.hpp"
#include "solotto/pulse.hpp"

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

int slope_sign_changes(const std::vector<double>& v) {
  int changes = 0;
  double prev = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double d = v[k] - v[k - 1];
    if (std::abs(d) < 1e-14) continue;
    if (prev != 0.0 && (d > 0) != (prev > 0)) ++changes;
    prev = d;
  }
  return changes;
}
}  // namespace

TEST_CASE("stroke config validation and time grid") {
  CHECK(kind_of([] { StrokeConfig{-0.1, -0.1, 100, 0.1}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { StrokeConfig{0.1, -0.2, 100, 0.1}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { StrokeConfig{-0.1, -0.2, 0, 0.1}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { StrokeConfig{-0.1, -0.2, 100, 0.0}.validate(); }) == ErrorKind::Validation);
  CHECK(kind_of([] { StrokeConfig{-0.1, -0.2, 100, 0.1, 1}.validate(); }) == ErrorKind::Validation);
  const auto t = kWeak.time_grid();
  REQUIRE(t.size() == kDefaultSamples);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 0.15);
  CHECK(t[500] == Approx(0.075).epsilon(1e-15));
}

TEST_CASE("reference ramp endpoints, midpoint and flat ends") {
  CHECK(reference_ramp(kWeak, 0.0) == Approx(-0.1).epsilon(1e-15));
  CHECK(reference_ramp(kWeak, 0.15) == Approx(-0.2).epsilon(1e-15));
  CHECK(reference_ramp(kWeak, 0.075) == Approx(-0.15).epsilon(1e-15));
  const double h = 1e-4;
  for (double t0 : {0.0 + h, 0.15 - h}) {
    const double d1 = (reference_ramp(kWeak, t0 + h) - reference_ramp(kWeak, t0 - h)) / (2 * h);
    CHECK(std::abs(d1) < 1e-4);
  }
  CHECK(kind_of([] { reference_ramp(kWeak, 0.2); }) == ErrorKind::Domain);
  CHECK(kind_of([] { reference_ramp(kWeak, -1e-3); }) == ErrorKind::Domain);
}

TEST_CASE("quintic with weak-trap endpoints: linear-system oracle") {
  const auto q = design_quintic(kWeak, EndpointWidths::WeakTrap);
  CHECK(q.value(0.0) == Approx(0.2).epsilon(1e-12));
  CHECK(q.value(0.15) == Approx(0.1).epsilon(1e-12));
  CHECK(q.value(0.075) == Approx(0.15).epsilon(1e-12));
  const double expected[6] = {0.2, 0, 0, -296.296296296, 2962.96296296, -7901.23456790};
  for (int i = 0; i < 6; ++i) {
    CHECK(q.coefficients[i] == Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("quintic boundary conditions and smoothstep identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> gdist(-0.5, -0.05), tdist(0.05, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    StrokeConfig cfg{gdist(rng), gdist(rng), 100.0, tdist(rng)};
    if (cfg.g_initial == cfg.g_final) continue;
    const auto q = design_quintic(cfg);
    const double ai = equilibrium_width(cfg.g_initial, cfg.particles);
    const double af = equilibrium_width(cfg.g_final, cfg.particles);
    const double tf = cfg.duration;
    CHECK(std::abs(q.value(0) - ai) < 1e-10);
    CHECK(std::abs(q.value(tf) - af) < 1e-10);
    CHECK(std::abs(q.velocity(0)) < 1e-10);
    CHECK(std::abs(q.velocity(tf)) < 1e-10);
    CHECK(std::abs(q.acceleration(0)) < 1e-10);
    CHECK(std::abs(q.acceleration(tf)) < 1e-10 * std::max(1.0, 1.0 / (tf * tf)));
    for (double s : {0.1, 0.37, 0.5, 0.81}) {
      const double smooth = ai + (af - ai) * s * s * s * (10 - 15 * s + 6 * s * s);
      CHECK(q.value(s * tf) == Approx(smooth).epsilon(1e-12));
    }
  }
}

TEST_CASE("STA pulse: exact endpoints, soliton regime, change in slope") {
  const auto p = sta_pulse(kWeak);
  CHECK(p.kind == PulseKind::Sta);
  CHECK(std::abs(p.g_values.front() - kWeak.g_initial) < 1e-9);
  CHECK(std::abs(p.g_values.back() - kWeak.g_final) < 1e-9);
  for (double g : p.g_values) CHECK(g < 0.0);
  CHECK(p.min_abs_gn() > 1.0);
  CHECK(slope_sign_changes(p.g_values) >= 1);
}

TEST_CASE("STA pulse with weak-trap endpoints is within the trap correction") {
  const auto q = design_quintic(kWeak, EndpointWidths::WeakTrap);
  const auto p = invert_to_pulse(q, kWeak);
  CHECK(std::abs(p.g_values.front() / kWeak.g_initial - 1.0) < 0.01);
  CHECK(std::abs(p.g_values.back() / kWeak.g_final - 1.0) < 0.01);
  CHECK(p.g_values.front() != Approx(kWeak.g_initial).epsilon(1e-9));
}

TEST_CASE("STA breakdown guard names the offending time") {
  StrokeConfig fast{-0.1, -0.2, 100.0, 0.01};
  try {
    sta_pulse(fast);
    FAIL("expected breakdown");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Breakdown);
    const std::string msg = e.what();
    CHECK(msg.find("t=") != std::string::npos);
    CHECK(msg.find("T_f=0.01") != std::string::npos);
  }
  // The unchecked inversion still produces the profile.
  const auto raw = invert_to_pulse_unchecked(design_quintic(fast), fast);
  CHECK(raw.min_abs_gn() <= 1.0);
}

TEST_CASE("TRA pulses: exact endpoints and monotonic") {
  for (auto shape : {TraShape::AdiabaticLimit, TraShape::ReferenceRamp}) {
    const auto p = tra_pulse(kWeak, shape);
    CHECK(p.kind == PulseKind::Tra);
    CHECK(std::abs(p.g_values.front() - kWeak.g_initial) < 1e-9);
    CHECK(std::abs(p.g_values.back() - kWeak.g_final) < 1e-9);
    for (std::size_t k = 1; k < p.g_values.size(); ++k) {
      CHECK(p.g_values[k] <= p.g_values[k - 1] + 1e-15);
    }
    for (std::size_t k = 0; k < p.g_values.size(); k += 100) {
      CHECK(p.a_values[k] == Approx(equilibrium_width(p.g_values[k], 100.0)).epsilon(1e-10));
    }
  }
  const auto ref = reference_pulse(kWeak);
  CHECK(ref.kind == PulseKind::AdiabaticReference);
}

TEST_CASE("STA and TRA pulses converge for slow strokes") {
  StrokeConfig slow{-0.1, -0.2, 100.0, 10.0};
  const auto sta = sta_pulse(slow);
  const auto tra = tra_pulse(slow);
  const auto ref = tra_pulse(slow, TraShape::ReferenceRamp);
  double gap = 0.0, gap_ref = 0.0;
  for (std::size_t k = 0; k < sta.g_values.size(); ++k) {
    gap = std::max(gap, std::abs(sta.g_values[k] - tra.g_values[k]));
    gap_ref = std::max(gap_ref, std::abs(sta.g_values[k] - ref.g_values[k]));
  }
  CHECK(gap < 1e-3 * 0.1);
  // The cosine reference has a different shape and does not converge to the STA ramp.
  CHECK(gap_ref > 1e-3 * 0.1);
  CHECK(gap_ref < 0.05);
  StrokeConfig fast = slow;
  fast.duration = 0.15;
  double gap_fast = 0.0;
  const auto sta_f = sta_pulse(fast), tra_f = tra_pulse(fast);
  for (std::size_t k = 0; k < sta_f.g_values.size(); ++k) {
    gap_fast = std::max(gap_fast, std::abs(sta_f.g_values[k] - tra_f.g_values[k]));
  }
  CHECK(gap < gap_fast);
}

TEST_CASE("pulse interpolant reproduces samples and smooth ramps") {
  const auto p = tra_pulse(kWeak, TraShape::ReferenceRamp);
  PulseInterpolant f(p);
  CHECK(f(0.0) == p.g_values.front());
  CHECK(f(0.15) == p.g_values.back());
  CHECK(f(-1.0) == p.g_values.front());
  for (std::size_t k = 0; k < p.times.size(); k += 37) {
    CHECK(f(p.times[k]) == Approx(p.g_values[k]).epsilon(1e-12));
  }
  for (double t : {0.01234, 0.0777, 0.1411}) {
    CHECK(f(t) == Approx(reference_ramp(kWeak, t)).epsilon(1e-9));
  }
  StrokeConfig tiny = kWeak;
  tiny.samples = 3;
  const auto p3 = tra_pulse(tiny, TraShape::ReferenceRamp);
  PulseInterpolant lin(p3);
  CHECK(lin(0.0375) == Approx(0.5 * (p3.g_values[0] + p3.g_values[1])));
}

TEST_CASE("closed loop: width equation under the STA pulse follows the quintic") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> g1(-0.3, -0.08), tdist(0.1, 2.0), ndist(60, 140);
  int done = 0;
  while (done < 10) {
    StrokeConfig cfg{g1(rng), g1(rng), ndist(rng), tdist(rng)};
    if (std::abs(cfg.g_initial - cfg.g_final) < 0.01) continue;
    PulseProfile p;
    try {
      p = sta_pulse(cfg);
    } catch (const Error&) {
      continue;
    }
    const auto q = design_quintic(cfg);
    const auto traj = integrate_width_eom(p, q.value(0), 0.0, cfg.duration * 1e-4);
    CHECK(std::abs(traj.width.back() - q.value(cfg.duration)) < 1e-6);
    CHECK(std::abs(traj.width[traj.width.size() / 2] - q.value(traj.times[traj.times.size() / 2])) <
          1e-6);
    ++done;
  }
}

TEST_CASE("pulse kind names") {
  CHECK(to_string(PulseKind::Sta) == "STA");
  CHECK(parse_pulse_kind("TRA") == PulseKind::Tra);
  CHECK(parse_pulse_kind("ADIABATIC_REFERENCE") == PulseKind::AdiabaticReference);
  CHECK(kind_of([] { parse_pulse_kind("nope"); }) == ErrorKind::Validation);
}
