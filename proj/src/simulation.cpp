#include "wave_esc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "wave_esc/config.hpp"

namespace wave_esc {
namespace {

std::vector<double> zeros_if_empty(const std::vector<double>& v,
                                   const Grid& grid) {
  return v.empty() ? std::vector<double>(grid.nodes(), 0.0) : v;
}

std::optional<BacksteppingGains> diagnostic_gains(const SimConfig& c) {
  if (!(c.control.gain_K > 0.0)) return std::nullopt;
  return BacksteppingGains::from_hessian(c.control.c0, c.control.gain_K,
                                         c.map.hessian, c.domain_length);
}

void reserve_trace(SimTrace& tr, std::size_t rows) {
  for (auto* col : {&tr.t, &tr.y, &tr.theta, &tr.Theta, &tr.U, &tr.G_hat,
                    &tr.H_hat, &tr.vartheta, &tr.Omega, &tr.V}) {
    col->reserve(rows);
  }
}

}  // namespace

const char* to_string(InitialState s) {
  return s == InitialState::rest ? "rest" : "probe";
}

const char* to_string(ProbeMode m) {
  return m == ProbeMode::continuum ? "continuum" : "grid";
}

Grid SimConfig::grid() const { return Grid(domain_length, nodes); }

ProbeDesign SimConfig::probe() const {
  return ProbeDesign::make(amplitude, frequency, domain_length);
}

double SimConfig::dt() const {
  return time_step > 0.0 ? time_step : grid().default_time_step();
}

std::uint64_t SimConfig::steps() const {
  return static_cast<std::uint64_t>(std::ceil(horizon / dt() - 1e-9));
}

void SimConfig::validate() const {
  if (!(map.hessian < 0.0) || !std::isfinite(map.hessian) ||
      !std::isfinite(map.optimizer) || !std::isfinite(map.optimum)) {
    throw ConfigError("map parameters must be finite with nonzero hessian");
  }
  const Grid g = grid();
  const ProbeDesign p = probe();
  if (!(time_step >= 0.0) || !std::isfinite(time_step)) {
    throw ConfigError("time.dt must be positive");
  }
  if (dt() > g.cfl_limit() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time.dt = " << dt() << " violates the CFL limit dt <= dx = "
       << g.cfl_limit();
    throw ConfigError(os.str());
  }
  if (!(horizon >= 10.0 * p.period()) || !std::isfinite(horizon)) {
    std::ostringstream os;
    os << "time.horizon = " << horizon
       << " must cover at least 10 periods of probe.frequency = " << frequency
       << " (" << 10.0 * p.period() << ")";
    throw ConfigError(os.str());
  }
  if (record_stride < 1) throw ConfigError("time.record_stride must be >= 1");
  if (!(control.gain_K >= 0.0) || !std::isfinite(control.gain_K)) {
    throw ConfigError("control.gain_K must be nonnegative");
  }
  if (!(control.filter_c > 0.0)) {
    throw ConfigError("control.filter_c must be positive");
  }
  if (!(control.c0 > 0.0) || !std::isfinite(control.c0)) {
    throw ConfigError("control.c0 must be positive");
  }
  if (!std::isfinite(control.theta_hat0)) {
    throw ConfigError("control.theta_hat0 must be finite");
  }
  if (!(lyapunov.delta > 0.0) || !std::isfinite(lyapunov.delta)) {
    throw ConfigError("lyapunov.delta must be positive");
  }
  diagnostic_gains(*this);
  ProbeReference(p, g, probe_mode, dt());
}

ProbeReference::ProbeReference(const ProbeDesign& design, const Grid& grid,
                               ProbeMode mode, double dt)
    : design_(design), grid_(grid), mode_(mode) {
  const double w = design.omega();
  if (mode == ProbeMode::continuum) {
    wavenumber_ = w;
    coefficient_ = design.coefficient();
    rate_factor_ = w;
  } else {
    const double dx = grid.spacing();
    const double s = dx / dt * std::sin(0.5 * w * dt);
    if (!(s < 1.0)) {
      throw ConfigError("probe.frequency is above the grid cutoff for this dt");
    }
    wavenumber_ = 2.0 / dx * std::asin(s);
    rate_factor_ = std::sin(w * dt) / dt;
  }
  shape_.resize(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    shape_[i] = std::cos(wavenumber_ * grid.node(i));
  }
  if (mode == ProbeMode::grid) {
    const double integral = spatial_integral(shape_, grid);
    if (std::abs(integral) < 1e-9 * grid.length()) {
      throw ValidationError("probe frequency is resonant on this grid");
    }
    coefficient_ = design.amplitude() / integral;
  }
}

std::vector<double> ProbeReference::values(double t) const {
  const double s = coefficient_ * std::sin(design_.omega() * t);
  std::vector<double> out(shape_.size());
  for (std::size_t i = 0; i < shape_.size(); ++i) out[i] = s * shape_[i];
  return out;
}

std::vector<double> ProbeReference::rates(double t) const {
  const double s = coefficient_ * rate_factor_ * std::cos(design_.omega() * t);
  std::vector<double> out(shape_.size());
  for (std::size_t i = 0; i < shape_.size(); ++i) out[i] = s * shape_[i];
  return out;
}

double ProbeReference::boundary(double t) const {
  return coefficient_ * shape_.back() * std::sin(design_.omega() * t);
}

ErrorFields compute_error_fields(const WaveField& field,
                                 const ProbeDesign& probe, const Grid& grid) {
  return compute_error_fields(field, ProbeReference(probe, grid, ProbeMode::continuum, 1.0),
                              grid);
}

ErrorFields compute_error_fields(const WaveField& field,
                                 const ProbeReference& reference,
                                 const Grid& grid) {
  if (field.displacement.size() != grid.nodes() ||
      field.velocity.size() != grid.nodes()) {
    throw ConfigError("compute_error_fields: field does not match grid");
  }
  ErrorFields e;
  e.alpha_bar = reference.values(field.time);
  e.u = reference.rates(field.time);
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    e.alpha_bar[i] = field.displacement[i] - e.alpha_bar[i];
    e.u[i] = field.velocity[i] - e.u[i];
  }
  e.u_t = second_difference(e.alpha_bar, grid);
  return e;
}

SimTrace run_closed_loop(const SimConfig& config) {
  config.validate();
  const Grid grid = config.grid();
  const ProbeDesign probe = config.probe();
  const double dt = config.dt();
  const ProbeReference reference(probe, grid, config.probe_mode, dt);
  const MapEvaluator plant(config.map);
  const auto gains = diagnostic_gains(config);
  const std::uint64_t steps = config.steps();
  const std::size_t stride = config.record_stride;
  const double a = probe.amplitude();
  const double w = probe.omega();
  const double theta_star = config.map.optimizer;

  // Trapezoid integral of the continuum cos(ωx), for the ϑ cross-check.
  std::vector<double> cos_shape(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    cos_shape[i] = std::cos(w * grid.node(i));
  }
  const double beta_integral = probe.coefficient() * spatial_integral(cos_shape, grid);

  std::vector<double> disp(grid.nodes(), 0.0);
  std::vector<double> vel(grid.nodes(), 0.0);
  if (config.initial_state == InitialState::probe) {
    disp = reference.values(0.0);
    vel = reference.rates(0.0);
    for (double& d : disp) d += config.control.theta_hat0;
  }
  WaveField field = init_field(grid, disp, vel, 0.0);
  ControllerState ctrl = make_controller_state(config.control, probe, dt);

  SimTrace trace;
  trace.config_hash = config_hash(config);
  trace.steps = steps;
  trace.stride = stride;
  trace.dt = dt;
  reserve_trace(trace, static_cast<std::size_t>(steps / stride + 1));

  auto fail = [&](const std::string& what, std::uint64_t n) {
    throw ClosedLoopBlowup(what, n, trace);
  };

  for (std::uint64_t n = 0;; ++n) {
    const double t = static_cast<double>(n) * dt;
    field.time = t;
    const double Theta = distributed_output(field, grid);
    const double y = plant(Theta);
    const ErrorFields ef = compute_error_fields(field, reference, grid);
    const double U_now = ctrl.U;
    const double theta_hat_now = ctrl.theta_hat;

    try {
      ctrl = filtered_control_step(std::move(ctrl), {y, Theta, ef.u, ef.u_t, t},
                                   probe, grid, dt);
    } catch (const ControllerBlowup& e) {
      fail(e.what(), n);
    }
    if (!std::isfinite(y) || std::abs(y) > kBlowupThreshold ||
        std::abs(ctrl.theta_hat) > kBlowupThreshold ||
        std::abs(ctrl.U) > kBlowupThreshold) {
      std::ostringstream os;
      os << "closed loop diverged at t=" << t << ": y=" << y
         << " theta_hat=" << ctrl.theta_hat << " U=" << ctrl.U;
      fail(os.str(), n);
    }

    if (n % stride == 0) {
      const double phase = std::sin(w * t);
      const double vartheta = Theta - a * phase - theta_star;
      const double vartheta_beta = Theta - beta_integral * phase - theta_star;
      trace.max_vartheta_gap =
          std::max(trace.max_vartheta_gap, std::abs(vartheta - vartheta_beta));
      trace.max_boundary_gap = std::max(
          trace.max_boundary_gap,
          std::abs(spatial_integral(ef.u_t, grid) -
                   boundary_slope(ef.alpha_bar, grid, End::right)));
      trace.max_boundary_error = std::max(
          trace.max_boundary_error, std::abs(ef.alpha_bar.back() - theta_hat_now));

      double V = std::numeric_limits<double>::quiet_NaN();
      if (gains) {
        const double Z = transform_Z(vartheta, ef.u, ef.u_t, grid, *gains);
        const auto wf = transform_w(ef.u, ef.u_t, Z, grid, *gains);
        const auto wt = transform_w_rate(ef.u, ef.u_t, grid, *gains);
        V = lyapunov_V(Z, wf, wt, grid, config.lyapunov);
      }
      const double Omega = omega_norm(vartheta, ef.u, ef.u_t, grid);
      trace.t.push_back(t);
      trace.y.push_back(y);
      trace.theta.push_back(theta_hat_now + reference.boundary(t));
      trace.Theta.push_back(Theta);
      trace.U.push_back(U_now);
      trace.G_hat.push_back(ctrl.G_hat);
      trace.H_hat.push_back(ctrl.H_hat);
      trace.vartheta.push_back(vartheta);
      trace.Omega.push_back(Omega);
      trace.V.push_back(V);
      if (!(Omega <= kBlowupThreshold) || std::abs(ctrl.G_hat) > kBlowupThreshold ||
          std::abs(ctrl.H_hat) > kBlowupThreshold ||
          (gains && !(V <= kBlowupThreshold))) {
        std::ostringstream os;
        os << "recorded magnitude above " << kBlowupThreshold << " at t=" << t
           << ": Omega=" << Omega << " V=" << V << " G_hat=" << ctrl.G_hat
           << " H_hat=" << ctrl.H_hat;
        fail(os.str(), n);
      }
    }
    if (n == steps) break;

    try {
      field = step(field, grid, ctrl.theta_hat + reference.boundary(t + dt), dt);
    } catch (const NumericalBlowup& e) {
      fail(e.what(), n);
    }
  }
  return trace;
}

AverageInitial z_mode_initial(const BacksteppingGains& gains, const Grid& grid) {
  const double l = gains.lambda();
  const double D = grid.length();
  const double C = 2.0 * gains.effective_gain() /
                   ((1.0 - gains.c0()) * gains.kernel_denominator());
  const double vartheta0 = -C * std::sinh(l * D) / (l * l);
  AverageInitial init;
  init.vartheta = 1.0;
  init.u.resize(grid.nodes());
  init.u_t.resize(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const double phi = C * std::cosh(l * grid.node(i)) / vartheta0;
    init.u[i] = phi;
    init.u_t[i] = -l * phi;
  }
  // Scale the whole profile so that the discrete control law holds at t = 0
  // (w(D, 0) = 0); patching u(D) alone leaves an O(Δx²) kink that radiates.
  // The mismatch is affine in the scale.
  const double Kbar = gains.effective_gain();
  auto mismatch = [&](double s) {
    std::vector<double> u(init.u), ut(init.u_t);
    for (double& v : u) v *= s;
    for (double& v : ut) v *= s;
    return u.back() - Kbar * transform_Z(init.vartheta, u, ut, grid, gains) +
           gains.c0() * spatial_integral(ut, grid);
  };
  const double r0 = mismatch(0.0);
  const double s = -r0 / (mismatch(1.0) - r0);
  for (double& v : init.u) v *= s;
  for (double& v : init.u_t) v *= s;
  return init;
}

AverageTrace run_average_system(const SimConfig& config,
                                const AverageInitial& initial) {
  config.validate();
  const Grid grid = config.grid();
  const double dt = config.dt();
  const auto maybe_gains = diagnostic_gains(config);
  if (!maybe_gains) {
    throw ConfigError("average system needs control.gain_K > 0");
  }
  const BacksteppingGains& gains = *maybe_gains;
  const std::uint64_t steps = config.steps();

  WaveField field = init_field(grid, zeros_if_empty(initial.u, grid),
                               zeros_if_empty(initial.u_t, grid), 0.0);
  double vartheta = initial.vartheta;
  TargetResidualMonitor monitor(grid, gains);

  AverageTrace out;
  out.lambda = gains.lambda();
  // Snapshot n is recorded once step n+1 exists, so the boundary velocity
  // can use the central difference that the interior leapfrog implies.
  auto record = [&](double t, const WaveField& f, double vt, double U) {
    const auto& u = f.displacement;
    const auto& ut = f.velocity;
    const double Z = transform_Z(vt, u, ut, grid, gains);
    auto w = transform_w(u, ut, Z, grid, gains);
    const auto wt = transform_w_rate(u, ut, grid, gains);
    out.t.push_back(t);
    out.vartheta.push_back(vt);
    out.Z.push_back(Z);
    out.U.push_back(U);
    out.Omega.push_back(omega_norm(vt, u, ut, grid));
    out.V.push_back(lyapunov_V(Z, w, wt, grid, config.lyapunov));
    monitor.push(t, Z, std::move(w));
  };

  WaveField held = field;
  double held_vartheta = vartheta;
  double held_U = average_control(vartheta, field.displacement, field.velocity, grid, gains);
  double boundary_before = field.displacement.back();
  bool first = true;
  for (std::uint64_t n = 0; n < steps; ++n) {
    const double mass = spatial_integral(field.displacement, grid);
    auto vartheta_after = [&](const WaveField& f) {
      return vartheta + 0.5 * dt * (mass + spatial_integral(f.displacement, grid));
    };
    auto control_after = [&](const WaveField& f) {
      return average_control(vartheta_after(f), f.displacement, f.velocity,
                             grid, gains);
    };
    const double c_zero = control_after(step(field, grid, 0.0, dt));
    const double slope = control_after(step(field, grid, 1.0, dt)) - c_zero;
    if (!(std::abs(1.0 - slope) > 1e-14)) {
      throw NumericalBlowup("average system: singular boundary solve", n);
    }
    const double U = c_zero / (1.0 - slope);
    field = step(field, grid, U, dt);
    vartheta = vartheta_after(field);
    if (!std::isfinite(vartheta) || std::abs(vartheta) > kBlowupThreshold) {
      throw NumericalBlowup("average system diverged", n);
    }
    if (!first) {
      held.velocity.back() = (field.displacement.back() - boundary_before) / (2.0 * dt);
    }
    record(static_cast<double>(n) * dt, held, held_vartheta, held_U);
    first = false;
    boundary_before = held.displacement.back();
    held = field;
    held_vartheta = vartheta;
    held_U = U;
  }
  record(static_cast<double>(steps) * dt, held, held_vartheta, held_U);
  out.residuals = monitor.report();
  return out;
}

double averaging_oracle(std::span<const double> samples, double dt,
                        double omega) {
  if (!(omega > 0.0) || !(dt > 0.0)) {
    throw ValidationError("averaging_oracle: omega and dt must be positive");
  }
  const double period = 2.0 * std::numbers::pi / omega;
  const double span = period / dt;
  auto whole = static_cast<std::size_t>(std::floor(span + 1e-9));
  double fraction = span - static_cast<double>(whole);
  if (fraction < 1e-9) fraction = 0.0;
  const std::size_t needed = whole + (fraction > 0.0 ? 2 : 1);
  if (samples.size() < needed) {
    throw ValidationError("averaging_oracle: samples cover less than one period");
  }
  const std::size_t last = samples.size() - 1;
  const std::size_t first = last - whole;
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += 0.5 * (samples[i] + samples[i + 1]);
  sum *= dt;
  if (fraction > 0.0) {
    const double edge = samples[first] + (samples[first - 1] - samples[first]) * fraction;
    sum += 0.5 * fraction * dt * (edge + samples[first]);
  }
  return sum / period;
}

BoundsReport ultimate_bounds_report(const SimTrace& trace,
                                    const SimConfig& config) {
  if (trace.size() == 0) throw ValidationError("ultimate_bounds_report: empty trace");
  BoundsReport r;
  r.window_start = 0.9 * trace.t.back();
  const double ts = config.map.optimizer;
  const double ys = config.map.optimum;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.t[i] < r.window_start) continue;
    r.sup_theta = std::max(r.sup_theta, std::abs(trace.theta[i] - ts));
    r.sup_Theta = std::max(r.sup_Theta, std::abs(trace.Theta[i] - ts));
    r.sup_y = std::max(r.sup_y, std::abs(trace.y[i] - ys));
    r.sup_vartheta = std::max(r.sup_vartheta, std::abs(trace.vartheta[i]));
  }
  const double a = config.amplitude;
  const double w = config.frequency;
  const double cot = check_frequency(w, config.domain_length).cot_abs;
  r.envelope_theta = a * w * cot + 1.0 / w;
  r.envelope_Theta = a + 1.0 / w;
  r.envelope_y = a * a + 1.0 / (w * w);
  r.c1 = r.sup_theta / r.envelope_theta;
  r.c2 = r.sup_Theta / r.envelope_Theta;
  r.c3 = r.sup_y / r.envelope_y;
  return r;
}

ExponentialFit fit_exponential(std::span<const double> t,
                               std::span<const double> v) {
  if (t.size() != v.size()) throw ValidationError("fit_exponential: size mismatch");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(v[i] > 0.0)) continue;
    const double ly = std::log(v[i]);
    n += 1;
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    syy += ly * ly;
  }
  if (n < 2) throw ValidationError("fit_exponential: fewer than two positive samples");
  const double cov = sxy - sx * sy / n;
  const double var_t = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  if (!(var_t > 0.0)) throw ValidationError("fit_exponential: degenerate time axis");
  const double slope = cov / var_t;
  ExponentialFit fit;
  fit.rate = -slope;
  fit.prefactor = std::exp((sy - slope * sx) / n);
  fit.r_squared = var_y > 0.0 ? cov * cov / (var_t * var_y) : 1.0;
  return fit;
}

}  // namespace wave_esc
