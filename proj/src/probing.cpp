#include "wave_esc/probing.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wave_esc/errors.hpp"

namespace wave_esc {
namespace {

void require_inside(const ProbeDesign& d, double x) {
  const double slack = 1e-12 * d.domain_length();
  if (!(x >= -slack && x <= d.domain_length() + slack)) {
    std::ostringstream os;
    os << "x = " << x << " lies outside [0, " << d.domain_length() << "]";
    throw ValidationError(os.str());
  }
}

void require_amplitude(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ValidationError("probe amplitude must be positive");
  }
}

}  // namespace

FrequencyVerdict check_frequency(double omega, double domain_length) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ValidationError("probe frequency must be positive");
  }
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw ValidationError("domain length must be positive");
  }
  const double unit = std::numbers::pi / domain_length;
  const double ratio = omega / unit;
  long k = std::lround(ratio);
  if (k < 1) k = 1;

  FrequencyVerdict v;
  v.nearest_k = k;
  v.resonance = static_cast<double>(k) * unit;
  v.distance = std::abs(omega - v.resonance);
  v.admissible = std::abs(ratio - static_cast<double>(k)) >= kResonanceTolerance;
  const double s = std::sin(omega * domain_length);
  v.cot_abs = s == 0.0 ? INFINITY : std::abs(std::cos(omega * domain_length) / s);
  return v;
}

ProbeDesign ProbeDesign::make(double amplitude, double omega,
                              double domain_length) {
  require_amplitude(amplitude);
  const FrequencyVerdict v = check_frequency(omega, domain_length);
  if (!v.admissible) {
    std::ostringstream os;
    os.precision(12);
    os << "probe frequency " << omega << " is resonant: k = " << v.nearest_k
       << ", k*pi/D = " << v.resonance << ", distance " << v.distance;
    throw ValidationError(os.str());
  }
  ProbeDesign d;
  d.amplitude_ = amplitude;
  d.omega_ = omega;
  d.length_ = domain_length;
  d.coefficient_ = amplitude * omega / std::sin(omega * domain_length);
  d.period_ = 2.0 * std::numbers::pi / omega;
  return d;
}

double ProbeDesign::boundary_amplitude() const noexcept {
  return coefficient_ * std::cos(omega_ * length_);
}

double beta(const ProbeDesign& d, double x, double t) {
  require_inside(d, x);
  return d.coefficient() * std::cos(d.omega() * x) * std::sin(d.omega() * t);
}

double beta_t(const ProbeDesign& d, double x, double t) {
  require_inside(d, x);
  return d.coefficient() * d.omega() * std::cos(d.omega() * x) *
         std::cos(d.omega() * t);
}

double beta_x(const ProbeDesign& d, double x, double t) {
  require_inside(d, x);
  return -d.coefficient() * d.omega() * std::sin(d.omega() * x) *
         std::sin(d.omega() * t);
}

double perturbation_S(const ProbeDesign& d, double t) {
  return beta(d, d.domain_length(), t);
}

double demod_M(double amplitude, double omega, double t) {
  require_amplitude(amplitude);
  return 2.0 / amplitude * std::sin(omega * t);
}

double demod_N(double amplitude, double omega, double t) {
  require_amplitude(amplitude);
  return -8.0 / (amplitude * amplitude) * std::cos(2.0 * omega * t);
}

}  // namespace wave_esc
