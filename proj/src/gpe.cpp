#include "solotto/gpe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "solotto/errors.hpp"

namespace solotto {

namespace {

constexpr double kPi = std::numbers::pi;

double sum_abs2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

double real_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid Grid::make(double length, std::size_t points) {
  Grid g{length, points};
  g.validate();
  return g;
}

void Grid::validate() const {
  std::ostringstream os;
  if (!(length > 0.0) || !std::isfinite(length)) {
    os << "grid: length must be positive, got " << length;
  } else if (points < 4 || (points & (points - 1)) != 0) {
    os << "grid: number of points must be a power of two >= 4, got " << points;
  } else {
    return;
  }
  throw Error(ErrorKind::Validation, os.str());
}

double Grid::dk() const { return 2.0 * kPi / length; }

double Grid::position(std::size_t j) const {
  return -0.5 * length + static_cast<double>(j) * dx();
}

std::vector<double> Grid::positions() const {
  std::vector<double> x(points);
  for (std::size_t j = 0; j < points; ++j) x[j] = position(j);
  return x;
}

std::vector<double> Grid::wavenumbers() const {
  std::vector<double> k(points);
  const auto n = static_cast<std::ptrdiff_t>(points);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::ptrdiff_t m = j < n / 2 ? j : j - n;
    k[static_cast<std::size_t>(j)] = static_cast<double>(m) * dk();
  }
  return k;
}

// ---------------------------------------------------------------- WaveFunction

WaveFunction WaveFunction::sech(const Grid& grid, double width, double particles, double chirp) {
  grid.validate();
  if (!(width > 0.0) || !(particles > 0.0)) {
    throw Error(ErrorKind::Domain, "WaveFunction::sech: width and particle number must be positive");
  }
  WaveFunction psi{grid, std::vector<Complex>(grid.points), particles};
  const double amp = std::sqrt(particles / (2.0 * width));
  for (std::size_t j = 0; j < grid.points; ++j) {
    const double x = grid.position(j);
    psi.amplitudes[j] = amp / std::cosh(x / width) * std::polar(1.0, chirp * x * x);
  }
  psi.normalize();
  return psi;
}

double WaveFunction::norm() const { return grid.dx() * sum_abs2(amplitudes); }

double WaveFunction::width_rms() const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < amplitudes.size(); ++j) {
    const double x = grid.position(j);
    const double rho = std::norm(amplitudes[j]);
    num += x * x * rho;
    den += rho;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double WaveFunction::edge_ratio() const {
  double peak = 0.0;
  for (const auto& z : amplitudes) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0.0;
  const double edge = std::max(std::abs(amplitudes.front()), std::abs(amplitudes.back()));
  return edge / peak;
}

void WaveFunction::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw Error(ErrorKind::Domain, "WaveFunction: cannot normalise a zero state");
  const double scale = std::sqrt(norm_target / n);
  for (auto& z : amplitudes) z *= scale;
}

// ---------------------------------------------------------------- GpeSolver

GpeSolver::GpeSolver(const Grid& grid) : grid_(grid), fft_(grid.points) {
  grid_.validate();
  x_ = grid_.positions();
  const auto k = grid_.wavenumbers();
  k2_.resize(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) k2_[j] = k[j] * k[j];
}

void GpeSolver::check_grid(const WaveFunction& psi) const {
  if (!(psi.grid == grid_) || psi.amplitudes.size() != grid_.points) {
    throw Error(ErrorKind::GridMismatch, "wavefunction grid does not match the solver grid");
  }
}

void GpeSolver::kinetic_phase(std::span<Complex> psi_k, double dt) const {
  for (std::size_t j = 0; j < psi_k.size(); ++j) psi_k[j] *= std::polar(1.0, -0.5 * k2_[j] * dt);
}

EnergyBreakdown GpeSolver::energy(const WaveFunction& psi, double g) const {
  check_grid(psi);
  const double dx = grid_.dx();
  std::vector<Complex> work(psi.amplitudes);
  fft_.forward(work);
  double kin = 0.0;
  for (std::size_t j = 0; j < work.size(); ++j) kin += k2_[j] * std::norm(work[j]);
  EnergyBreakdown e;
  e.kinetic = 0.5 * kin * dx / static_cast<double>(grid_.points);
  double trap = 0.0;
  double quartic = 0.0;
  for (std::size_t j = 0; j < work.size(); ++j) {
    const double rho = std::norm(psi.amplitudes[j]);
    trap += x_[j] * x_[j] * rho;
    quartic += rho * rho;
  }
  e.trap = 0.5 * trap * dx;
  e.interaction = 0.5 * g * quartic * dx;
  e.total = e.kinetic + e.trap + e.interaction;
  return e;
}

std::vector<Complex> GpeSolver::apply_hamiltonian(std::span<const Complex> psi, double g) const {
  std::vector<Complex> hk(psi.begin(), psi.end());
  fft_.forward(hk);
  for (std::size_t j = 0; j < hk.size(); ++j) hk[j] *= 0.5 * k2_[j];
  fft_.backward(hk);
  for (std::size_t j = 0; j < hk.size(); ++j) {
    hk[j] += (0.5 * x_[j] * x_[j] + g * std::norm(psi[j])) * psi[j];
  }
  return hk;
}

std::pair<double, double> GpeSolver::chemical_potential_and_residual(const WaveFunction& psi,
                                                                     double g) const {
  check_grid(psi);
  const auto h = apply_hamiltonian(psi.amplitudes, g);
  Complex num = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) num += std::conj(psi.amplitudes[j]) * h[j];
  const double den = sum_abs2(psi.amplitudes);
  const double mu = num.real() / den;
  double r2 = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) r2 += std::norm(h[j] - mu * psi.amplitudes[j]);
  return {mu, std::sqrt(r2 / den)};
}

GroundStateResult GpeSolver::ground_state(double g, double particles,
                                          const GroundStateOptions& options) const {
  if (!(particles > 0.0)) throw Error(ErrorKind::Domain, "ground_state: particle number must be positive");
  if (!(g < 0.0)) throw Error(ErrorKind::Domain, "ground_state: interaction must be negative");

  const std::size_t n = grid_.points;
  const double dx = grid_.dx();
  const double width = equilibrium_width(g, particles);

  // The ground state is real; work with real arrays and a complex scratch
  // buffer for the transforms.
  std::vector<double> psi(n);
  {
    const auto init = WaveFunction::sech(grid_, width, particles);
    for (std::size_t j = 0; j < n; ++j) psi[j] = init.amplitudes[j].real();
  }
  auto renormalise = [&](std::vector<double>& v) {
    const double s = std::sqrt(particles / (dx * real_dot(v, v)));
    for (auto& y : v) y *= s;
  };

  std::vector<Complex> buf(n);
  auto apply_h = [&](const std::vector<double>& v, const std::vector<double>& density) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = v[j];
    fft_.forward(buf);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= 0.5 * k2_[j];
    fft_.backward(buf);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = buf[j].real() + (0.5 * x_[j] * x_[j] + g * density[j]) * v[j];
    }
    return out;
  };
  auto density_of = [&](const std::vector<double>& v) {
    std::vector<double> rho(n);
    for (std::size_t j = 0; j < n; ++j) rho[j] = v[j] * v[j];
    return rho;
  };
  auto residual_of = [&](const std::vector<double>& v, double& mu, std::vector<double>& r) {
    const auto hv = apply_h(v, density_of(v));
    const double vv = real_dot(v, v);
    mu = real_dot(v, hv) / vv;
    r.resize(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = hv[j] - mu * v[j];
    return std::sqrt(real_dot(r, r) / vv);
  };

  std::size_t iterations = 0;
  double mu = 0.0;
  std::vector<double> r;
  double res = residual_of(psi, mu, r);

  // Stage 1: normalised imaginary-time split-step. Its fixed point carries an
  // O(dtau^2) splitting error, so it is stopped once the residual stagnates.
  {
    const double dtau = options.imaginary_dt;
    std::vector<double> half_kin(n);
    for (std::size_t j = 0; j < n; ++j) half_kin[j] = std::exp(-0.25 * k2_[j] * dtau);
    constexpr std::size_t kBatch = 50;
    while (res > options.tolerance && iterations < options.max_iterations) {
      for (std::size_t s = 0; s < kBatch; ++s) {
        for (std::size_t j = 0; j < n; ++j) buf[j] = psi[j];
        fft_.forward(buf);
        for (std::size_t j = 0; j < n; ++j) buf[j] *= half_kin[j];
        fft_.backward(buf);
        for (std::size_t j = 0; j < n; ++j) {
          const double v = buf[j].real();
          psi[j] = v * std::exp(-(0.5 * x_[j] * x_[j] + g * v * v) * dtau);
        }
        for (std::size_t j = 0; j < n; ++j) buf[j] = psi[j];
        fft_.forward(buf);
        for (std::size_t j = 0; j < n; ++j) buf[j] *= half_kin[j];
        fft_.backward(buf);
        for (std::size_t j = 0; j < n; ++j) psi[j] = buf[j].real();
        renormalise(psi);
      }
      iterations += kBatch;
      const double next = residual_of(psi, mu, r);
      const bool stagnated = next > 0.9 * res;
      res = next;
      if (stagnated) break;
    }
  }

  // Stage 2: preconditioned locally optimal block iteration with the density
  // frozen at the current iterate. Its fixed points satisfy H psi = mu psi.
  {
    std::vector<double> previous;
    std::vector<double> d(n);
    while (res > options.tolerance && iterations < options.max_iterations) {
      ++iterations;
      const double shift = std::max(1.0, std::abs(mu));
      for (std::size_t j = 0; j < n; ++j) buf[j] = r[j];
      fft_.forward(buf);
      for (std::size_t j = 0; j < n; ++j) buf[j] /= 0.5 * k2_[j] + shift;
      fft_.backward(buf);
      for (std::size_t j = 0; j < n; ++j) d[j] = buf[j].real();

      // Orthonormal basis {psi, d, previous step} by modified Gram-Schmidt.
      std::vector<std::vector<double>> basis;
      auto add = [&](std::vector<double> v) {
        const double original = std::sqrt(real_dot(v, v));
        if (original == 0.0) return;
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& b : basis) {
            const double c = real_dot(b, v);
            for (std::size_t j = 0; j < n; ++j) v[j] -= c * b[j];
          }
        }
        const double len = std::sqrt(real_dot(v, v));
        if (len <= 1e-12 * original) return;
        for (auto& y : v) y /= len;
        basis.push_back(std::move(v));
      };
      add(psi);
      add(d);
      if (!previous.empty()) add(previous);

      const auto rho = density_of(psi);
      const std::size_t m = basis.size();
      std::vector<std::vector<double>> hb;
      hb.reserve(m);
      for (const auto& b : basis) hb.push_back(apply_h(b, rho));
      Eigen::MatrixXd hs(m, m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) hs(a, b) = real_dot(basis[a], hb[b]);
      }
      hs = 0.5 * (hs + hs.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hs);
      Eigen::VectorXd c = eig.eigenvectors().col(0);
      if (c(0) < 0.0) c = -c;

      std::vector<double> next(n, 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t j = 0; j < n; ++j) next[j] += c(static_cast<Eigen::Index>(a)) * basis[a][j];
      }
      renormalise(next);
      previous.resize(n);
      for (std::size_t j = 0; j < n; ++j) previous[j] = next[j] - psi[j];
      psi = std::move(next);
      res = residual_of(psi, mu, r);
    }
  }

  if (res > options.tolerance) {
    std::ostringstream os;
    os << "ground_state: not converged after " << iterations << " iterations (residual " << res
       << ", tolerance " << options.tolerance << ") for g=" << g << ", N=" << particles;
    throw Error(ErrorKind::NonConvergence, os.str());
  }

  GroundStateResult out;
  out.psi = WaveFunction{grid_, std::vector<Complex>(psi.begin(), psi.end()), particles};
  if (out.psi.edge_ratio() > options.edge_threshold) {
    std::ostringstream os;
    os << "ground_state: density does not decay at the box edge (|psi_edge|/max|psi| = "
       << out.psi.edge_ratio() << "); increase the box length L=" << grid_.length;
    throw Error(ErrorKind::BoxTooSmall, os.str());
  }
  out.chemical_potential = mu;
  out.energy = energy(out.psi, g);
  out.iterations = iterations;
  out.residual = res;
  return out;
}

EvolutionResult GpeSolver::evolve(const WaveFunction& psi0,
                                  const std::function<double(double)>& g_of_t, double duration,
                                  const EvolutionOptions& options) const {
  check_grid(psi0);
  if (!(duration > 0.0)) throw Error(ErrorKind::Validation, "evolve: duration must be positive");
  if (!(options.dt > 0.0)) throw Error(ErrorKind::Validation, "evolve: dt must be positive");

  const auto steps = static_cast<std::size_t>(std::ceil(duration / options.dt - 1e-9));
  const double dt = duration / static_cast<double>(steps);
  const std::size_t n = grid_.points;

  std::vector<Complex> half_kin(n);
  std::vector<Complex> full_kin(n);
  for (std::size_t j = 0; j < n; ++j) {
    half_kin[j] = std::polar(1.0, -0.25 * k2_[j] * dt);
    full_kin[j] = std::polar(1.0, -0.5 * k2_[j] * dt);
  }
  std::vector<double> trap(n);
  for (std::size_t j = 0; j < n; ++j) trap[j] = 0.5 * x_[j] * x_[j];

  EvolutionResult result;
  result.dt = dt;
  result.steps = steps;
  WaveFunction state = psi0;
  const double initial_norm = state.norm();
  const double initial_energy = energy(state, g_of_t(0.0)).total;

  auto record = [&](double t) {
    ObservableSample s;
    s.t = t;
    s.norm = state.norm();
    s.energy = energy(state, g_of_t(t));
    s.width_rms = state.width_rms();
    s.work = s.energy.total - initial_energy;
    if (std::abs(s.norm - initial_norm) > options.norm_tolerance * state.norm_target) {
      std::ostringstream os;
      os << "evolve: norm drifted from " << initial_norm << " to " << s.norm << " at t=" << t;
      throw Error(ErrorKind::NormDrift, os.str());
    }
    result.series.push_back(s);
    if (options.keep_snapshots) result.snapshots.push_back(state);
  };

  record(0.0);
  auto& psi = state.amplitudes;
  fft_.forward(psi);
  for (std::size_t j = 0; j < n; ++j) psi[j] *= half_kin[j];
  for (std::size_t s = 0; s < steps; ++s) {
    fft_.backward(psi);
    const double t_mid = (static_cast<double>(s) + 0.5) * dt;
    const double g = g_of_t(t_mid);
    for (std::size_t j = 0; j < n; ++j) {
      psi[j] *= std::polar(1.0, -(trap[j] + g * std::norm(psi[j])) * dt);
    }
    fft_.forward(psi);
    const bool last = s + 1 == steps;
    const bool output = last || (options.output_every > 0 && (s + 1) % options.output_every == 0);
    if (output) {
      for (std::size_t j = 0; j < n; ++j) psi[j] *= half_kin[j];
      fft_.backward(psi);
      record(last ? duration : static_cast<double>(s + 1) * dt);
      if (!last) {
        fft_.forward(psi);
        for (std::size_t j = 0; j < n; ++j) psi[j] *= half_kin[j];
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) psi[j] *= full_kin[j];
    }
  }
  result.final_state = std::move(state);
  return result;
}

EvolutionResult GpeSolver::evolve(const WaveFunction& psi0, const PulseProfile& pulse,
                                  const EvolutionOptions& options) const {
  check_soliton_regime(pulse);
  const double tf = pulse.config.duration;
  EvolutionOptions opts = options;
  opts.dt = std::min(options.dt, tf / 1000.0);
  const PulseInterpolant g(pulse);
  return evolve(psi0, std::cref(g), tf, opts);
}

// ---------------------------------------------------------------- free functions

GroundStateResult prepare_ground_state(double g, double particles, const Grid& grid,
                                       const GroundStateOptions& options) {
  return GpeSolver(grid).ground_state(g, particles, options);
}

EvolutionResult evolve(const WaveFunction& psi0, const PulseProfile& pulse,
                       const EvolutionOptions& options) {
  return GpeSolver(psi0.grid).evolve(psi0, pulse, options);
}

EnergyBreakdown energy(const WaveFunction& psi, double g) {
  return GpeSolver(psi.grid).energy(psi, g);
}

double fidelity(const WaveFunction& psi, const WaveFunction& target) {
  if (!(psi.grid == target.grid) || psi.amplitudes.size() != target.amplitudes.size()) {
    throw Error(ErrorKind::GridMismatch, "fidelity: states live on different grids");
  }
  Complex overlap = 0.0;
  for (std::size_t j = 0; j < psi.amplitudes.size(); ++j) {
    overlap += std::conj(psi.amplitudes[j]) * target.amplitudes[j];
  }
  const double na = sum_abs2(psi.amplitudes);
  const double nb = sum_abs2(target.amplitudes);
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorKind::Domain, "fidelity: zero state");
  return std::min(1.0, std::norm(overlap) / (na * nb));
}

double instantaneous_eigenenergy(double g, double particles, EigenenergyMode mode,
                                 const Grid& grid) {
  if (mode == EigenenergyMode::Variational) {
    return ansatz_energy({equilibrium_width(g, particles), particles, g}).total;
  }
  return prepare_ground_state(g, particles, grid).energy.total;
}

}  // namespace solotto
