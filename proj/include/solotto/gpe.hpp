#pragma once

// Spectral solver for the 1D Gross-Pitaevskii equation
//   i psi_t = [-1/2 d_xx + x^2/2 + g(t) |psi|^2] psi
// on a periodic box [-L/2, L/2).

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "solotto/fft.hpp"
#include "solotto/pulse.hpp"
#include "solotto/variational.hpp"

namespace solotto {

using Complex = std::complex<double>;

struct Grid {
  double length = 16.0;
  std::size_t points = 1024;

  static Grid make(double length, std::size_t points);  // validating factory
  void validate() const;

  double dx() const { return length / static_cast<double>(points); }
  double dk() const;
  double position(std::size_t j) const;
  std::vector<double> positions() const;
  /// Wavenumbers in FFT order: 0, dk, ..., (n/2-1) dk, -(n/2) dk, ..., -dk.
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid&) const = default;
};

struct WaveFunction {
  Grid grid;
  std::vector<Complex> amplitudes;
  double norm_target = 0.0;

  /// A sech(x/a) exp(i chirp x^2) with A chosen so that the norm is N on the
  /// continuum (the discrete norm then matches to spectral accuracy).
  static WaveFunction sech(const Grid& grid, double width, double particles, double chirp = 0.0);

  double norm() const;       // dx * sum |psi|^2
  double width_rms() const;  // sqrt(<x^2>)
  /// max(|psi(edge)|) / max |psi|, the edge being the first and last grid point.
  double edge_ratio() const;
  void normalize();          // rescale to norm_target
};

struct GroundStateOptions {
  double imaginary_dt = 1e-3;
  double tolerance = 1e-8;          // on ||H psi - mu psi|| / ||psi||
  std::size_t max_iterations = 20000;
  double edge_threshold = 1e-8;
};

struct GroundStateResult {
  WaveFunction psi;
  double chemical_potential = 0.0;
  EnergyBreakdown energy;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct ObservableSample {
  double t = 0.0;
  double norm = 0.0;
  EnergyBreakdown energy;
  double width_rms = 0.0;
  double work = 0.0;
};

struct EvolutionOptions {
  double dt = 1e-4;
  /// Record observables every this many steps (the first and last step are
  /// always recorded). Zero records only the endpoints.
  std::size_t output_every = 100;
  bool keep_snapshots = false;
  double norm_tolerance = 1e-6;  // relative to N
};

struct EvolutionResult {
  WaveFunction final_state;
  std::vector<ObservableSample> series;
  std::vector<WaveFunction> snapshots;  // only if keep_snapshots
  double dt = 0.0;                      // step actually used
  std::size_t steps = 0;
};

/// Owns FFT plans and work buffers for one grid. One instance per thread.
class GpeSolver {
 public:
  explicit GpeSolver(const Grid& grid);

  const Grid& grid() const { return grid_; }

  EnergyBreakdown energy(const WaveFunction& psi, double g) const;

  /// H psi with H = -1/2 d_xx + x^2/2 + g |psi|^2.
  std::vector<Complex> apply_hamiltonian(std::span<const Complex> psi, double g) const;

  /// mu = <psi|H|psi> / <psi|psi> and ||H psi - mu psi|| / ||psi||.
  std::pair<double, double> chemical_potential_and_residual(const WaveFunction& psi,
                                                            double g) const;

  GroundStateResult ground_state(double g, double particles,
                                 const GroundStateOptions& options = {}) const;

  /// Strang splitting: half kinetic step, nonlinear + trap step with g at the
  /// step midpoint, half kinetic step. The step is reduced so that an integer
  /// number of steps spans `duration`.
  EvolutionResult evolve(const WaveFunction& psi0, const std::function<double(double)>& g_of_t,
                         double duration, const EvolutionOptions& options = {}) const;

  /// Evolution under a sampled pulse (cubic interpolation between samples).
  /// Requires dt <= T_f / 1000; a larger requested dt is reduced to T_f/1000.
  EvolutionResult evolve(const WaveFunction& psi0, const PulseProfile& pulse,
                         const EvolutionOptions& options = {}) const;

 private:
  void check_grid(const WaveFunction& psi) const;
  void kinetic_phase(std::span<Complex> psi_k, double dt) const;

  Grid grid_;
  Fft fft_;
  std::vector<double> x_;
  std::vector<double> k2_;
};

GroundStateResult prepare_ground_state(double g, double particles, const Grid& grid,
                                       const GroundStateOptions& options = {});

EvolutionResult evolve(const WaveFunction& psi0, const PulseProfile& pulse,
                       const EvolutionOptions& options = {});

EnergyBreakdown energy(const WaveFunction& psi, double g);

/// |<psi|target>|^2 / (||psi||^2 ||target||^2), in [0, 1].
double fidelity(const WaveFunction& psi, const WaveFunction& target);

enum class EigenenergyMode { Variational, Numeric };

/// Energy of the instantaneous stationary state at interaction g.
double instantaneous_eigenenergy(double g, double particles, EigenenergyMode mode,
                                 const Grid& grid = {});

}  // namespace solotto
