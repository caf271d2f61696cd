#pragma once

namespace wave_esc {

/// Quadratic objective y = y* + (H/2)(Θ − Θ*)².
///
/// Always stored in the maximization convention (H < 0). A minimization
/// problem (H > 0) is negated on construction and `minimization` is set, so
/// the stored map is −Q and its extremum is still a maximum.
struct MapParams {
  double hessian = -2.0;
  double optimizer = 2.0;
  double optimum = 5.0;
  bool minimization = false;

  /// Throws ValidationError for H == 0 or non-finite values.
  static MapParams make(double hessian, double optimizer, double optimum);
};

double eval_map(const MapParams& params, double theta);

/// Converts a value of the stored (maximization) map back to the user's map.
double original_value(const MapParams& params, double stored_value);

/// Opaque Θ ↦ y handle given to controller-side code. It exposes no
/// ground-truth fields; only diagnostics hold a MapParams.
class MapEvaluator {
 public:
  explicit MapEvaluator(const MapParams& params) : params_(params) {}
  double operator()(double theta) const { return eval_map(params_, theta); }

 private:
  MapParams params_;
};

}  // namespace wave_esc
