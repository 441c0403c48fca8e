#pragma once
// Time integration. The linear Airy part is handled exactly through the
// integrating factor e^{in³t} (the scheme is unitary on the linear flow);
// the nonlinear tendency is advanced with classical RK4 in the twisted
// variable. Global order 4 in dt.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlab/equations.hpp"

namespace kdvlab {

// Uniformly sampled solution history.
struct Trajectory {
  EquationSpec eq;
  std::vector<double> times;        // t₀ + j Δ, uniform
  std::vector<SystemState> slices;  // same length as times
  double dt_internal = 0.0;         // solver step used between samples

  int n_samples() const { return int(times.size()); }
  double t0() const { return times.front(); }
  double t1() const { return times.back(); }
  double sample_dt() const {
    return times.size() > 1 ? times[1] - times[0] : 0.0;
  }
};

// Thrown when the solution stops being finite or the L² mass of a component
// grows by 1e6 over its initial value.
struct BlowUpError : std::runtime_error {
  double last_good_time;
  explicit BlowUpError(double t)
      : std::runtime_error("blow-up detected at t = " + std::to_string(t)),
        last_good_time(t) {}
};

struct EvolveOptions {
  double dt = 1e-3;        // requested internal step (shrunk to divide T)
  int samples = 1;         // recorded intervals between t0 and t0+T
  bool warn_stiff = true;  // advisory dt <= 1/n_max³ warning on stderr
};

// Advance `initial` by T under `eq`; records samples+1 uniformly spaced
// slices (including both endpoints). The internal step divides the sample
// spacing exactly.
Trajectory evolve(const SystemState& initial, const EquationSpec& eq, double T,
                  const EvolveOptions& opt);

// One internal RK4 step of size dt (exposed for convergence tests).
SystemState rk4_step(const SystemState& state, const EquationSpec& eq,
                     double dt);

// Resolution-doubling reference: re-runs from the same initial data with
// 4x the band (zero-padded) and dt/8, then projects back onto the original
// band. Same sampling grid as `evolve` with the given options.
Trajectory reference_solution(const SystemState& initial,
                              const EquationSpec& eq, double T,
                              const EvolveOptions& opt);

// ---------------------------------------------------------------------------
// Conservation audit
// ---------------------------------------------------------------------------

struct ConservationSeries {
  std::string name;              // "mass", "energy", "mean", "mass_u", ...
  std::vector<double> values;    // per sample
  double drift_max_rel = 0.0;    // max_t |q(t)-q(0)| / max(|q(0)|, floor)
  bool conserved = true;         // whether the flow is expected to keep it
};

struct ConservationReport {
  std::vector<ConservationSeries> series;
  const ConservationSeries& operator[](const std::string& name) const;
};

// Mass/energy/mean per component (plus the cross integral ∫uv and the total
// mass for the two-component system, where the individual masses are *not*
// conserved and are reported with conserved=false).
ConservationReport conservation_report(const Trajectory& traj);

// ---------------------------------------------------------------------------
// Checkpoints: "t n_max eq_kind sign" header plus one spectrum dump per
// component (two header+dump groups for the system).
// ---------------------------------------------------------------------------

std::string dump_checkpoint(const Trajectory& traj, int sample_index);
struct Checkpoint {
  EquationSpec eq;
  SystemState state;
};
Checkpoint parse_checkpoint(const std::string& text);

// ---------------------------------------------------------------------------
// Trajectory-level transports
// ---------------------------------------------------------------------------

// Gauge between mkdv and renormalized_mkdv: the renormalized solution is the
// mkdv one watched from a frame moving at sign * c_gauge * ∫u₀² dx.
// to_renormalized expects an mkdv trajectory, from_renormalized the reverse.
enum class GaugeDirection { to_renormalized, from_renormalized };
Trajectory gauge_translate(const Trajectory& traj, GaugeDirection dir);

// Pointwise Miura image v(t) = miura_field(u(t), alpha, beta) of an mkdv
// trajectory (labels the result as kdv data; band doubles).
Trajectory miura_map(const Trajectory& traj);

}  // namespace kdvlab
