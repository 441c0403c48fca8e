#include "kdvlab/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "kdvlab/calibration.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {

namespace {

// e^{i n³ θ} multiplier (the free Airy group under this sign convention:
// u_t + u_xxx = 0  =>  coef(n)(t) = e^{i n³ t} coef(n)(0)).
SystemState airy_phase(const SystemState& s, double theta) {
  SystemState out = s;
  for (SpectralField& f : out.comps) {
    std::vector<cplx> half = f.half();
    for (int n = 0; n < int(half.size()); ++n) {
      double ph = double(n) * double(n) * double(n) * theta;
      half[std::size_t(n)] *= cplx{std::cos(ph), std::sin(ph)};
    }
    f = SpectralField::from_half(std::move(half));
  }
  return out;
}

SystemState axpy(const SystemState& x, double a,
                 const std::vector<SpectralField>& y) {
  SystemState out = x;
  for (std::size_t c = 0; c < out.comps.size(); ++c) {
    std::vector<cplx> half = out.comps[c].half();
    const SpectralField& g = y[c];
    for (int n = 0; n < int(half.size()); ++n) {
      half[std::size_t(n)] += a * g.coef(n);
    }
    out.comps[c] = SpectralField::from_half(std::move(half));
  }
  return out;
}

double total_l2_sq(const SystemState& s) {
  double acc = 0.0;
  for (const SpectralField& f : s.comps) acc += l2_norm_sq(f);
  return acc;
}

bool all_finite(const SystemState& s) {
  for (const SpectralField& f : s.comps) {
    for (const cplx& c : f.half()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  return true;
}

}  // namespace

SystemState rk4_step(const SystemState& state, const EquationSpec& eq,
                     double dt) {
  // Integrating-factor RK4: RK4 applied to v' = E(-τ) N(E(τ) v) with the
  // twist taken at the step start; E is the exact Airy phase.
  auto N = [&eq](const SystemState& s) { return evaluate_rhs(eq, s); };

  std::vector<SpectralField> k1 = N(state);
  std::vector<SpectralField> k2 =
      airy_phase({N(airy_phase(axpy(state, dt / 2.0, k1), dt / 2.0)),
                  state.time},
                 -dt / 2.0)
          .comps;
  std::vector<SpectralField> k3 =
      airy_phase({N(airy_phase(axpy(state, dt / 2.0, k2), dt / 2.0)),
                  state.time},
                 -dt / 2.0)
          .comps;
  std::vector<SpectralField> k4 =
      airy_phase({N(airy_phase(axpy(state, dt, k3), dt)), state.time}, -dt)
          .comps;

  SystemState acc = axpy(state, dt / 6.0, k1);
  acc = axpy(acc, dt / 3.0, k2);
  acc = axpy(acc, dt / 3.0, k3);
  acc = axpy(acc, dt / 6.0, k4);
  SystemState out = airy_phase(acc, dt);
  out.time = state.time + dt;
  return out;
}

Trajectory evolve(const SystemState& initial, const EquationSpec& eq, double T,
                  const EvolveOptions& opt) {
  eq.validate();
  if (int(initial.comps.size()) != eq.n_components()) {
    throw std::invalid_argument("evolve: component count mismatch");
  }
  if (!(T > 0.0) || !(opt.dt > 0.0) || opt.samples < 1) {
    throw std::invalid_argument("evolve: bad T/dt/samples");
  }
  int n_max = initial.comps[0].n_max();
  double sample_dt = T / double(opt.samples);
  int per_sample = std::max(1, int(std::ceil(sample_dt / opt.dt - 1e-12)));
  double dt = sample_dt / double(per_sample);
  if (opt.warn_stiff && n_max >= 1) {
    double advisory = 1.0 / (double(n_max) * n_max * n_max);
    if (dt > advisory) {
      std::fprintf(stderr,
                   "advisory: dt = %.3g exceeds 1/n_max^3 = %.3g "
                   "(exact linear phase keeps this stable; accuracy is the "
                   "caller's concern)\n",
                   dt, advisory);
    }
  }

  Trajectory traj;
  traj.eq = eq;
  traj.dt_internal = dt;
  traj.times.reserve(std::size_t(opt.samples) + 1);
  traj.slices.reserve(std::size_t(opt.samples) + 1);

  double l2_initial = std::sqrt(std::max(total_l2_sq(initial), 1e-300));
  SystemState cur = initial;
  traj.times.push_back(initial.time);
  traj.slices.push_back(cur);
  for (int s = 1; s <= opt.samples; ++s) {
    for (int q = 0; q < per_sample; ++q) {
      double t_last = cur.time;
      cur = rk4_step(cur, eq, dt);
      if (!all_finite(cur) ||
          std::sqrt(total_l2_sq(cur)) > 1e6 * l2_initial) {
        throw BlowUpError(t_last);
      }
    }
    cur.time = initial.time + double(s) * sample_dt;  // avoid drift
    traj.times.push_back(cur.time);
    traj.slices.push_back(cur);
  }
  return traj;
}

Trajectory reference_solution(const SystemState& initial,
                              const EquationSpec& eq, double T,
                              const EvolveOptions& opt) {
  int n_max = initial.comps[0].n_max();
  int wide = 4 * n_max;
  SystemState padded = initial;
  for (SpectralField& f : padded.comps) {
    std::vector<cplx> half = f.half();
    half.resize(std::size_t(wide) + 1, cplx{0.0, 0.0});
    f = SpectralField::from_half(std::move(half));
  }
  EvolveOptions fine = opt;
  fine.dt = opt.dt / 8.0;
  fine.warn_stiff = false;
  Trajectory wide_traj = evolve(padded, eq, T, fine);
  for (SystemState& s : wide_traj.slices) {
    for (SpectralField& f : s.comps) {
      std::vector<cplx> half = f.half();
      half.resize(std::size_t(n_max) + 1);
      f = SpectralField::from_half(std::move(half));
    }
  }
  return wide_traj;
}

// --------------------------------------------------------------------------

const ConservationSeries& ConservationReport::operator[](
    const std::string& name) const {
  for (const ConservationSeries& s : series) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("ConservationReport: no series named " + name);
}

namespace {

ConservationSeries make_series(std::string name, std::vector<double> values,
                               bool conserved) {
  ConservationSeries s;
  s.name = std::move(name);
  s.values = std::move(values);
  s.conserved = conserved;
  double q0 = s.values.front();
  double denom = std::max(std::abs(q0), 1e-8);
  for (double v : s.values) {
    s.drift_max_rel = std::max(s.drift_max_rel, std::abs(v - q0) / denom);
  }
  return s;
}

}  // namespace

ConservationReport conservation_report(const Trajectory& traj) {
  std::size_t K = traj.slices.size();
  ConservationReport rep;
  std::vector<double> energy(K);
  for (std::size_t j = 0; j < K; ++j) {
    energy[j] = energy_integral(traj.eq, traj.slices[j]);
  }
  if (traj.eq.n_components() == 1) {
    std::vector<double> mass(K), mean(K);
    for (std::size_t j = 0; j < K; ++j) {
      mass[j] = mass_integral(traj.slices[j].comps[0]);
      mean[j] = mean_integral(traj.slices[j].comps[0]);
    }
    rep.series.push_back(make_series("mass", std::move(mass), true));
    rep.series.push_back(make_series("energy", std::move(energy), true));
    rep.series.push_back(make_series("mean", std::move(mean), true));
    return rep;
  }
  std::vector<double> mu(K), mv(K), mt(K), cross(K), mean_u(K), mean_v(K);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < K; ++j) {
    const SpectralField& u = traj.slices[j].comps[0];
    const SpectralField& v = traj.slices[j].comps[1];
    mu[j] = mass_integral(u);
    mv[j] = mass_integral(v);
    mt[j] = mu[j] + mv[j];
    // ∫ u v dx = (1/2π) Σ u^(n) conj(v^(n)).
    double c = u.coef(0).real() * v.coef(0).real();
    for (int n = 1; n <= u.n_max(); ++n) {
      c += 2.0 * (u.coef(n) * std::conj(v.coef(n))).real();
    }
    cross[j] = c / kTwoPi;
    mean_u[j] = mean_integral(u);
    mean_v[j] = mean_integral(v);
  }
  // Individual masses and the cross integral trade mass through the coupling
  // and are reported as diagnostics, not conservation laws.
  rep.series.push_back(make_series("mass_u", std::move(mu), false));
  rep.series.push_back(make_series("mass_v", std::move(mv), false));
  rep.series.push_back(make_series("mass_total", std::move(mt), true));
  rep.series.push_back(make_series("cross_uv", std::move(cross), false));
  rep.series.push_back(make_series("energy", std::move(energy), true));
  rep.series.push_back(make_series("mean_u", std::move(mean_u), true));
  rep.series.push_back(make_series("mean_v", std::move(mean_v), true));
  return rep;
}

// --------------------------------------------------------------------------

std::string dump_checkpoint(const Trajectory& traj, int sample_index) {
  if (sample_index < 0 || sample_index >= traj.n_samples()) {
    throw std::out_of_range("dump_checkpoint: sample index");
  }
  const SystemState& st = traj.slices[std::size_t(sample_index)];
  std::string out;
  for (const SpectralField& f : st.comps) {
    out += str_printf("%.17g %d %s %d\n", traj.times[std::size_t(sample_index)],
                      f.n_max(), eq_kind_name(traj.eq.kind), traj.eq.sign);
    out += dump_spectrum(f);
  }
  return out;
}

Checkpoint parse_checkpoint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Checkpoint cp;
  bool have_header = false;
  double t = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    // Header lines have 4 tokens with an equation name in third place.
    double t_here;
    int n_max;
    std::string kind;
    int sign;
    if ((ls >> t_here >> n_max >> kind >> sign) && !kind.empty() &&
        !std::isdigit((unsigned char)kind[0]) && kind[0] != '-') {
      EquationSpec eq{eq_kind_from_name(kind), sign};
      eq.validate();
      if (have_header && (eq.kind != cp.eq.kind || eq.sign != cp.eq.sign)) {
        throw std::runtime_error("parse_checkpoint: inconsistent headers");
      }
      if (have_header && t_here != t) {
        throw std::runtime_error("parse_checkpoint: inconsistent times");
      }
      cp.eq = eq;
      t = t_here;
      have_header = true;
      // Collect the following 2*n_max+1 spectrum lines.
      std::string block;
      for (int i = 0; i < 2 * n_max + 1; ++i) {
        if (!std::getline(in, line)) {
          throw std::runtime_error("parse_checkpoint: truncated spectrum");
        }
        block += line;
        block += '\n';
      }
      cp.state.comps.push_back(parse_spectrum(block));
      continue;
    }
    throw std::runtime_error("parse_checkpoint: malformed header: " + line);
  }
  if (!have_header) throw std::runtime_error("parse_checkpoint: empty input");
  cp.state.time = t;
  if (int(cp.state.comps.size()) != cp.eq.n_components()) {
    throw std::runtime_error("parse_checkpoint: component count mismatch");
  }
  return cp;
}

// --------------------------------------------------------------------------

Trajectory gauge_translate(const Trajectory& traj, GaugeDirection dir) {
  bool to_renorm = dir == GaugeDirection::to_renormalized;
  EqKind want = to_renorm ? EqKind::mkdv : EqKind::renormalized_mkdv;
  if (traj.eq.kind != want) {
    throw std::invalid_argument(
        "gauge_translate: trajectory has the wrong equation kind");
  }
  double mass0 = mass_integral(traj.slices.front().comps[0]);
  double rate = double(traj.eq.sign) * calib::c_gauge * mass0;
  Trajectory out = traj;
  out.eq.kind = to_renorm ? EqKind::renormalized_mkdv : EqKind::mkdv;
  for (std::size_t j = 0; j < out.slices.size(); ++j) {
    double shift = rate * (traj.times[j] - traj.times.front());
    if (!to_renorm) shift = -shift;
    out.slices[j].comps[0] = translate_field(traj.slices[j].comps[0], shift);
  }
  return out;
}

Trajectory miura_map(const Trajectory& traj) {
  if (traj.eq.kind != EqKind::mkdv || traj.eq.sign != +1) {
    throw std::invalid_argument(
        "miura_map: expects a defocusing mkdv trajectory");
  }
  Trajectory out;
  out.eq = EquationSpec::kdv();
  out.times = traj.times;
  out.dt_internal = traj.dt_internal;
  out.slices.reserve(traj.slices.size());
  for (const SystemState& s : traj.slices) {
    SystemState img;
    img.time = s.time;
    img.comps.push_back(
        miura_field(s.comps[0], calib::miura_alpha, calib::miura_beta));
    out.slices.push_back(std::move(img));
  }
  return out;
}

}  // namespace kdvlab
