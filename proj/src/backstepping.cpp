#include "wave_esc/backstepping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wave_esc/errors.hpp"

namespace wave_esc {
namespace {

constexpr double kDenominatorFloor = 1e-12;

void require_size(std::span<const double> values, const Grid& grid,
                  const char* what) {
  if (values.size() != grid.nodes()) {
    throw ConfigError(std::string(what) + ": array has " +
                      std::to_string(values.size()) + " entries, grid has " +
                      std::to_string(grid.nodes()));
  }
}

double checked_denominator(const BacksteppingGains& g) {
  const double den = g.kernel_denominator();
  if (!std::isfinite(den) || std::abs(den) < kDenominatorFloor) {
    throw KernelSingularity("kernel denominator e^{lambda D} + r e^{-lambda D} = " +
                            std::to_string(den) + " (c0 = " +
                            std::to_string(g.c0()) + ", lambda = " +
                            std::to_string(g.lambda()) + ")");
  }
  return den;
}

double l2_squared(std::span<const double> f, const Grid& grid) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return spatial_integral(sq, grid);
}

}  // namespace

BacksteppingGains BacksteppingGains::unchecked(double c0, double gain_K,
                                               double effective_gain,
                                               double domain_length) {
  BacksteppingGains g;
  g.c0_ = c0;
  g.gain_K_ = gain_K;
  g.effective_gain_ = effective_gain;
  g.length_ = domain_length;
  g.lambda_ = -domain_length * effective_gain;
  g.ratio_ = (1.0 + c0) / (1.0 - c0);
  return g;
}

BacksteppingGains BacksteppingGains::make(double c0, double gain_K,
                                          double effective_gain,
                                          double domain_length) {
  if (!std::isfinite(c0) || !(c0 > 0.0)) {
    throw ValidationError("control.c0 must be positive");
  }
  if (std::abs(c0 - 1.0) < 1e-12) {
    throw KernelSingularity("control.c0 = 1 makes the kernel ratio infinite");
  }
  if (!std::isfinite(gain_K) || !(gain_K > 0.0)) {
    throw ValidationError("control.gain_K must be positive");
  }
  if (!std::isfinite(domain_length) || !(domain_length > 0.0)) {
    throw ValidationError("domain length must be positive");
  }
  if (!std::isfinite(effective_gain) || !(effective_gain < 0.0)) {
    throw ValidationError(
        "effective gain K*H must be negative so that lambda > 0");
  }
  BacksteppingGains g = unchecked(c0, gain_K, effective_gain, domain_length);
  if (c0 > 1.0) {
    const double crit = g.critical_lambda();
    if (std::abs(g.lambda_ - crit) <= 1e-9 * crit) {
      throw KernelSingularity("lambda = " + std::to_string(g.lambda_) +
                              " equals the excluded value " +
                              std::to_string(crit) + " for c0 = " +
                              std::to_string(c0));
    }
  }
  checked_denominator(g);
  return g;
}

BacksteppingGains BacksteppingGains::from_hessian(double c0, double gain_K,
                                                  double hessian,
                                                  double domain_length) {
  return make(c0, gain_K, gain_K * hessian, domain_length);
}

double BacksteppingGains::critical_lambda() const noexcept {
  if (!(c0_ > 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log((1.0 + c0_) / (c0_ - 1.0)) / (2.0 * length_);
}

double BacksteppingGains::kernel_denominator() const noexcept {
  return std::exp(lambda_ * length_) + ratio_ * std::exp(-lambda_ * length_);
}

double kernel_gamma(const BacksteppingGains& gains, double x) {
  const double den = checked_denominator(gains);
  const double l = gains.lambda();
  return gains.effective_gain() *
         (std::exp(l * x) + gains.ratio() * std::exp(-l * x)) / den;
}

double kernel_gamma_prime(const BacksteppingGains& gains, double x) {
  const double den = checked_denominator(gains);
  const double l = gains.lambda();
  return gains.effective_gain() * l *
         (std::exp(l * x) - gains.ratio() * std::exp(-l * x)) / den;
}

std::vector<double> kernel_gamma_nodes(const BacksteppingGains& gains,
                                       const Grid& grid) {
  std::vector<double> out(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    out[i] = kernel_gamma(gains, grid.node(i));
  }
  return out;
}

double transform_Z(double vartheta, std::span<const double> u,
                   std::span<const double> u_t, const Grid& grid,
                   const BacksteppingGains& gains) {
  require_size(u, grid, "transform_Z u");
  require_size(u_t, grid, "transform_Z u_t");
  const double D = grid.length();
  std::vector<double> weighted(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    weighted[i] = gain_g(grid.node(i), D) * u_t[i];
  }
  return vartheta - gain_g_prime(D, D) * gains.c0() * spatial_integral(u, grid) +
         spatial_integral(weighted, grid);
}

std::vector<double> transform_w(std::span<const double> u,
                                std::span<const double> u_t, double Z,
                                const Grid& grid,
                                const BacksteppingGains& gains) {
  require_size(u, grid, "transform_w u");
  require_size(u_t, grid, "transform_w u_t");
  const auto cum = cumulative_integral(u_t, grid);
  const auto gamma = kernel_gamma_nodes(gains, grid);
  std::vector<double> w(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    w[i] = u[i] - gamma[i] * Z + gains.c0() * cum[i];
  }
  return w;
}

std::vector<double> inverse_transform_w(std::span<const double> w,
                                        std::span<const double> u_t, double Z,
                                        const Grid& grid,
                                        const BacksteppingGains& gains) {
  require_size(w, grid, "inverse_transform_w w");
  require_size(u_t, grid, "inverse_transform_w u_t");
  const auto cum = cumulative_integral(u_t, grid);
  const auto gamma = kernel_gamma_nodes(gains, grid);
  std::vector<double> u(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    u[i] = w[i] + gamma[i] * Z - gains.c0() * cum[i];
  }
  return u;
}

double transform_Z_rate(std::span<const double> u, std::span<const double> u_t,
                        const Grid& grid, const BacksteppingGains& gains) {
  require_size(u, grid, "transform_Z_rate u");
  require_size(u_t, grid, "transform_Z_rate u_t");
  const double D = grid.length();
  const auto lap = second_difference(u, grid);
  std::vector<double> weighted(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    weighted[i] = gain_g(grid.node(i), D) * lap[i];
  }
  return spatial_integral(u, grid) -
         gain_g_prime(D, D) * gains.c0() * spatial_integral(u_t, grid) +
         spatial_integral(weighted, grid);
}

std::vector<double> transform_w_rate(std::span<const double> u,
                                     std::span<const double> u_t,
                                     const Grid& grid,
                                     const BacksteppingGains& gains) {
  const double z_rate = transform_Z_rate(u, u_t, grid, gains);
  const auto cum = cumulative_integral(second_difference(u, grid), grid);
  const auto gamma = kernel_gamma_nodes(gains, grid);
  std::vector<double> out(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    out[i] = u_t[i] - gamma[i] * z_rate + gains.c0() * cum[i];
  }
  return out;
}

double lyapunov_V(double Z, std::span<const double> w,
                  std::span<const double> w_t, const Grid& grid,
                  const LyapunovConfig& cfg) {
  require_size(w, grid, "lyapunov_V w");
  require_size(w_t, grid, "lyapunov_V w_t");
  const auto wx = first_difference(w, grid);
  std::vector<double> cross(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    cross[i] = (grid.node(i) - 2.0) * wx[i] * w_t[i];
  }
  const double v = 0.5 * Z * Z + 0.5 * (l2_squared(wx, grid) + l2_squared(w_t, grid)) +
                   cfg.delta * spatial_integral(cross, grid);
  if (v < 0.0) {
    throw ConfigError("Lyapunov functional is negative (" + std::to_string(v) +
                      "); reduce lyapunov.delta");
  }
  return v;
}

void probe_positive_definite(const LyapunovConfig& cfg, const Grid& grid,
                             std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> coeff(0.0, 1.0);
  const std::size_t n = grid.nodes();
  const double D = grid.length();
  constexpr int kModes = 6;

  auto check = [&](const std::vector<double>& w, const std::vector<double>& wt) {
    const double V = lyapunov_V(0.0, w, wt, grid, cfg);
    const double bound =
        0.25 * (l2_squared(first_difference(w, grid), grid) + l2_squared(wt, grid));
    if (V < bound) {
      throw ConfigError("lyapunov.delta = " + std::to_string(cfg.delta) +
                        " breaks the lower bound V >= (|w_x|^2 + |w_t|^2)/4; "
                        "reduce lyapunov.delta");
    }
  };

  std::vector<double> w(n), wt(n);
  for (int trial = 0; trial < trials; ++trial) {
    double a[kModes], b[kModes];
    for (int k = 0; k < kModes; ++k) {
      a[k] = coeff(rng) / (1.0 + k);
      b[k] = coeff(rng) / (1.0 + k);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.node(i);
      w[i] = 0.0;
      wt[i] = 0.0;
      for (int k = 0; k < kModes; ++k) {
        const double kx = (k + 0.5) * M_PI * x / D;
        w[i] += a[k] * std::cos(kx);
        wt[i] += b[k] * std::cos(kx);
      }
    }
    check(w, wt);
  }
  // Cross term is extremal when ∂ₜw is parallel to ∂ₓw.
  for (std::size_t i = 0; i < n; ++i) w[i] = std::cos(1.5 * M_PI * grid.node(i) / D);
  const auto wx = first_difference(w, grid);
  for (double sign : {1.0, -1.0}) {
    for (std::size_t i = 0; i < n; ++i) wt[i] = sign * wx[i];
    check(w, wt);
  }
}

double omega_norm(double vartheta, std::span<const double> u,
                  std::span<const double> u_t, const Grid& grid) {
  require_size(u, grid, "omega_norm u");
  require_size(u_t, grid, "omega_norm u_t");
  return vartheta * vartheta + l2_squared(first_difference(u, grid), grid) +
         l2_squared(u_t, grid);
}

double TargetResidualReport::worst() const noexcept {
  return std::max({z_decay, left_boundary, right_boundary, interior_wave});
}

TargetResidualMonitor::TargetResidualMonitor(const Grid& grid,
                                             const BacksteppingGains& gains)
    : grid_(grid), gains_(gains) {}

void TargetResidualMonitor::push(double t, double Z, std::vector<double> w) {
  require_size(w, grid_, "TargetResidualMonitor w");
  double amp = std::abs(Z);
  for (double v : w) amp = std::max(amp, std::abs(v));
  raw_.scale = std::max(raw_.scale, amp);
  raw_.right_boundary = std::max(raw_.right_boundary, std::abs(w.back()));
  sq_right_ += w.back() * w.back();
  ++snapshots_;

  window_.push_back({t, Z, std::move(w)});
  if (window_.size() > 3) window_.pop_front();
  if (window_.size() < 3) return;

  const Snapshot& prev = window_[0];
  const Snapshot& mid = window_[1];
  const Snapshot& next = window_[2];
  const double dt = mid.t - prev.t;
  if (!(dt > 0.0) || std::abs((next.t - mid.t) - dt) > 1e-9 * dt) {
    throw ConfigError("TargetResidualMonitor: snapshots must be equally spaced");
  }
  const double z_res = (next.Z - prev.Z) / (2.0 * dt) + gains_.lambda() * mid.Z;
  raw_.z_decay = std::max(raw_.z_decay, std::abs(z_res));
  sq_z_ += z_res * z_res;

  const double wt0 = (next.w[0] - prev.w[0]) / (2.0 * dt);
  const double left = boundary_slope(mid.w, grid_, End::left) - gains_.c0() * wt0;
  raw_.left_boundary = std::max(raw_.left_boundary, std::abs(left));
  sq_left_ += left * left;

  const double dx = grid_.spacing();
  for (std::size_t i = 1; i + 1 < grid_.nodes(); ++i) {
    const double wtt = (next.w[i] - 2.0 * mid.w[i] + prev.w[i]) / (dt * dt);
    const double wxx = (mid.w[i + 1] - 2.0 * mid.w[i] + mid.w[i - 1]) / (dx * dx);
    raw_.interior_wave = std::max(raw_.interior_wave, std::abs(wtt - wxx));
    sq_wave_ += (wtt - wxx) * (wtt - wxx);
    ++wave_terms_;
  }
  ++raw_.samples;
}

TargetResidualReport TargetResidualMonitor::report() const {
  TargetResidualReport r = raw_;
  auto rms = [](double sq, std::size_t n) {
    return n > 0 ? std::sqrt(sq / static_cast<double>(n)) : 0.0;
  };
  r.rms_z_decay = rms(sq_z_, raw_.samples);
  r.rms_left_boundary = rms(sq_left_, raw_.samples);
  r.rms_right_boundary = rms(sq_right_, snapshots_);
  r.rms_interior_wave = rms(sq_wave_, wave_terms_);
  if (r.scale > 0.0) {
    for (double* v : {&r.z_decay, &r.left_boundary, &r.right_boundary,
                      &r.interior_wave, &r.rms_z_decay, &r.rms_left_boundary,
                      &r.rms_right_boundary, &r.rms_interior_wave}) {
      *v /= r.scale;
    }
  }
  return r;
}

TargetResidualReport target_residuals(std::span<const TargetSnapshot> trajectory,
                                      const BacksteppingGains& gains,
                                      const Grid& grid) {
  TargetResidualMonitor monitor(grid, gains);
  for (const auto& s : trajectory) monitor.push(s.t, s.Z, s.w);
  return monitor.report();
}

}  // namespace wave_esc
