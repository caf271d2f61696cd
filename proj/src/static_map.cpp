#include "wave_esc/static_map.hpp"

#include <cmath>

#include "wave_esc/errors.hpp"

namespace wave_esc {

MapParams MapParams::make(double hessian, double optimizer, double optimum) {
  if (!std::isfinite(hessian) || !std::isfinite(optimizer) ||
      !std::isfinite(optimum)) {
    throw ValidationError("map parameters must be finite");
  }
  if (hessian == 0.0) {
    throw ValidationError("map hessian must be nonzero");
  }
  MapParams p;
  p.optimizer = optimizer;
  if (hessian > 0.0) {
    p.hessian = -hessian;
    p.optimum = -optimum;
    p.minimization = true;
  } else {
    p.hessian = hessian;
    p.optimum = optimum;
  }
  return p;
}

double eval_map(const MapParams& params, double theta) {
  const double d = theta - params.optimizer;
  return params.optimum + 0.5 * params.hessian * d * d;
}

double original_value(const MapParams& params, double stored_value) {
  return params.minimization ? -stored_value : stored_value;
}

}  // namespace wave_esc
