#include "wave_esc/wave_field.hpp"

#include <cmath>
#include <string>

#include "wave_esc/errors.hpp"

namespace wave_esc {
namespace {

void require_size(std::span<const double> values, const Grid& grid,
                  const char* what) {
  if (values.size() != grid.nodes()) {
    throw ConfigError(std::string(what) + ": array has " +
                      std::to_string(values.size()) + " entries, grid has " +
                      std::to_string(grid.nodes()));
  }
}

// Laplacian for nodes 0..N-2 (the last node is boundary data).
void laplacian_into(std::span<const double> a, double inv_dx2,
                    std::vector<double>& out) {
  const std::size_t n = a.size();
  out[0] = 2.0 * (a[1] - a[0]) * inv_dx2;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (a[i + 1] - 2.0 * a[i] + a[i - 1]) * inv_dx2;
  }
}

}  // namespace

Grid::Grid(double domain_length, std::size_t node_count)
    : length_(domain_length), nodes_(node_count) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw ConfigError("grid.domain_length must be positive and finite");
  }
  if (node_count < 3) {
    throw ConfigError("grid.nodes must be at least 3");
  }
  spacing_ = domain_length / static_cast<double>(node_count - 1);
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> x(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) x[i] = node(i);
  return x;
}

WaveField init_field(const Grid& grid, std::span<const double> displacement,
                     std::span<const double> velocity, double time) {
  require_size(displacement, grid, "init_field displacement");
  require_size(velocity, grid, "init_field velocity");
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    if (!std::isfinite(displacement[i]) || !std::isfinite(velocity[i])) {
      throw ValidationError("init_field: non-finite entry at node " +
                            std::to_string(i));
    }
  }
  WaveField f;
  f.displacement.assign(displacement.begin(), displacement.end());
  f.velocity.assign(velocity.begin(), velocity.end());
  f.time = time;
  f.step_index = 0;
  f.boundary_prev = f.displacement.back();
  return f;
}

WaveField step(const WaveField& field, const Grid& grid, double boundary_value,
               double dt) {
  const std::size_t n = grid.nodes();
  if (field.displacement.size() != n || field.velocity.size() != n) {
    throw ConfigError("step: field does not match grid");
  }
  if (!(dt > 0.0) || dt > grid.cfl_limit() * (1.0 + 1e-12)) {
    throw ConfigError("step: time step " + std::to_string(dt) +
                      " violates CFL limit dt <= dx = " +
                      std::to_string(grid.cfl_limit()));
  }
  if (!std::isfinite(boundary_value)) {
    throw NumericalBlowup("step: non-finite boundary value",
                          field.step_index);
  }

  const double inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
  const double half = 0.5 * dt;
  std::vector<double> lap(n, 0.0);

  WaveField next;
  next.velocity.resize(n);
  next.displacement.resize(n);

  laplacian_into(field.displacement, inv_dx2, lap);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    next.velocity[i] = field.velocity[i] + half * lap[i];
    next.displacement[i] = field.displacement[i] + dt * next.velocity[i];
  }
  next.displacement[n - 1] = boundary_value;

  laplacian_into(next.displacement, inv_dx2, lap);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    next.velocity[i] += half * lap[i];
  }

  const double current = field.displacement[n - 1];
  next.velocity[n - 1] =
      field.step_index == 0
          ? 2.0 * (boundary_value - current) / dt - field.velocity[n - 1]
          : (3.0 * boundary_value - 4.0 * current + field.boundary_prev) /
                (2.0 * dt);

  next.time = field.time + dt;
  next.step_index = field.step_index + 1;
  next.boundary_prev = current;

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(next.displacement[i]) ||
        !std::isfinite(next.velocity[i])) {
      throw NumericalBlowup("wave solver produced NaN/Inf at node " +
                                std::to_string(i),
                            next.step_index);
    }
  }
  return next;
}

double spatial_integral(std::span<const double> values, const Grid& grid) {
  require_size(values, grid, "spatial_integral");
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  sum += 0.5 * (values.front() + values.back());
  return sum * grid.spacing();
}

std::vector<double> cumulative_integral(std::span<const double> values,
                                        const Grid& grid) {
  require_size(values, grid, "cumulative_integral");
  std::vector<double> out(values.size(), 0.0);
  const double h = 0.5 * grid.spacing();
  for (std::size_t i = 1; i < values.size(); ++i) {
    out[i] = out[i - 1] + h * (values[i - 1] + values[i]);
  }
  return out;
}

double distributed_output(const WaveField& field, const Grid& grid) {
  return spatial_integral(field.displacement, grid);
}

double boundary_slope(std::span<const double> values, const Grid& grid,
                      End end) {
  require_size(values, grid, "boundary_slope");
  const double inv = 1.0 / (2.0 * grid.spacing());
  const std::size_t n = values.size();
  if (end == End::left) {
    return (-3.0 * values[0] + 4.0 * values[1] - values[2]) * inv;
  }
  return (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) * inv;
}

std::vector<double> first_difference(std::span<const double> values,
                                     const Grid& grid) {
  require_size(values, grid, "first_difference");
  const std::size_t n = values.size();
  const double inv = 1.0 / (2.0 * grid.spacing());
  std::vector<double> d(n);
  d[0] = boundary_slope(values, grid, End::left);
  d[n - 1] = boundary_slope(values, grid, End::right);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (values[i + 1] - values[i - 1]) * inv;
  }
  return d;
}

std::vector<double> second_difference(std::span<const double> values,
                                      const Grid& grid) {
  require_size(values, grid, "second_difference");
  const std::size_t n = values.size();
  const double inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<double> d(n);
  laplacian_into(values, inv_dx2, d);
  if (n >= 4) {
    d[n - 1] = (2.0 * values[n - 1] - 5.0 * values[n - 2] +
                4.0 * values[n - 3] - values[n - 4]) *
               inv_dx2;
  } else {
    d[n - 1] = (values[n - 1] - 2.0 * values[n - 2] + values[n - 3]) * inv_dx2;
  }
  return d;
}

double discrete_energy(const WaveField& field, const Grid& grid) {
  const auto& v = field.velocity;
  const auto& a = field.displacement;
  const double dx = grid.spacing();
  double kinetic = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) kinetic += v[i] * v[i];
  kinetic += 0.5 * (v.front() * v.front() + v.back() * v.back());
  double strain = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double s = (a[i + 1] - a[i]) / dx;
    strain += s * s;
  }
  return 0.5 * kinetic * dx + 0.5 * strain * dx;
}

}  // namespace wave_esc
