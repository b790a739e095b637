#include "cise/kernel_oracle.hpp"

#include <cmath>

#include "cise/integrate.hpp"

namespace cise {
namespace {

// All input-box grid points, input_samples per axis, in row-major order.
std::vector<Eigen::VectorXd> input_grid(const SystemModel& sys, int samples) {
  const int l = sys.input_dim();
  std::vector<Eigen::VectorXd> grid;
  int total = 1;
  for (int d = 0; d < l; ++d) total *= samples;
  grid.reserve(static_cast<size_t>(total));
  for (int flat = 0; flat < total; ++flat) {
    Eigen::VectorXd u(l);
    int rest = flat;
    for (int d = 0; d < l; ++d) {
      const int idx = rest % samples;
      rest /= samples;
      u[d] = sys.u_min()[d] +
             (sys.u_max()[d] - sys.u_min()[d]) * idx / (samples - 1);
    }
    grid.push_back(std::move(u));
  }
  return grid;
}

}  // namespace

std::array<int, 2> GridKernel::locate(const Vector2d& x) const {
  if (!safe_box.contains(x)) return {-1, -1};
  const Vector2d rel = (x - safe_box.lo).cwiseQuotient(cell_size());
  const int i = std::min(resolution[0] - 1, static_cast<int>(rel.x()));
  const int j = std::min(resolution[1] - 1, static_cast<int>(rel.y()));
  return {i, j};
}

GridKernel viability_kernel(const SystemModel& sys, const StateBox& safe_box,
                            std::array<int, 2> resolution, int input_samples, double dt_k) {
  if (resolution[0] < 20 || resolution[1] < 20) {
    throw ContractError("kernel grid needs at least 20 cells per axis");
  }
  if (input_samples < 9) throw ContractError("kernel needs at least 9 input samples");
  if (!(dt_k > 0.0)) throw ContractError("kernel step must be positive");
  if (!((safe_box.lo.array() < safe_box.hi.array()).all())) {
    throw ContractError("safe box is empty");
  }

  GridKernel kernel;
  kernel.safe_box = safe_box;
  kernel.resolution = resolution;
  kernel.input_samples = input_samples;
  const int nc = resolution[0] * resolution[1];
  kernel.membership.assign(static_cast<size_t>(nc), 1);

  const std::vector<Eigen::VectorXd> inputs = input_grid(sys, input_samples);
  const int nu = static_cast<int>(inputs.size());

  // One RK4 step per (cell, input), landing cell precomputed once.
  std::vector<std::int32_t> succ(static_cast<size_t>(nc) * static_cast<size_t>(nu));
  for (int j = 0; j < resolution[1]; ++j) {
    for (int i = 0; i < resolution[0]; ++i) {
      const Vector2d x = kernel.cell_center(i, j);
      const size_t base = (static_cast<size_t>(j) * resolution[0] + i) * static_cast<size_t>(nu);
      for (int k = 0; k < nu; ++k) {
        const Eigen::VectorXd& u = inputs[static_cast<size_t>(k)];
        const Vector2d y = rk4_step(
            [&](const Vector2d& xx) { return Vector2d(sys.closed_loop(xx, u)); }, x, dt_k);
        const std::array<int, 2> cell = kernel.locate(y);
        succ[base + static_cast<size_t>(k)] =
            cell[0] < 0 ? -1 : cell[1] * resolution[0] + cell[0];
      }
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = 0; c < nc; ++c) {
      if (!kernel.membership[static_cast<size_t>(c)]) continue;
      bool viable = false;
      const size_t base = static_cast<size_t>(c) * static_cast<size_t>(nu);
      for (int k = 0; k < nu; ++k) {
        const std::int32_t to = succ[base + static_cast<size_t>(k)];
        if (to >= 0 && kernel.membership[static_cast<size_t>(to)]) {
          viable = true;
          break;
        }
      }
      if (!viable) {
        kernel.membership[static_cast<size_t>(c)] = 0;
        changed = true;
      }
    }
  }
  return kernel;
}

bool analytic_di_kernel(const Vector2d& x) {
  const double p = x.x();
  const double v = x.y();
  if (std::abs(p) > 1.0) return false;
  if (v > 0.0 && p > 1.0 - 0.5 * v * v) return false;
  if (v < 0.0 && p < -1.0 + 0.5 * v * v) return false;
  return true;
}

ContainmentReport kernel_contains(const GridKernel& kernel, const BoundaryState& boundary,
                                  int margin_cells, int samples_per_segment) {
  const std::vector<Vector2d> samples = polyline(boundary, samples_per_segment);
  ContainmentReport report;
  report.ok = true;
  int inside = 0;
  for (const Vector2d& x : samples) {
    const std::array<int, 2> cell = kernel.locate(x);
    if (cell[0] >= 0 && kernel.member(cell[0], cell[1])) {
      ++inside;
      continue;
    }
    bool near = false;
    if (cell[0] >= 0) {
      for (int dj = -margin_cells; dj <= margin_cells && !near; ++dj) {
        for (int di = -margin_cells; di <= margin_cells && !near; ++di) {
          const int i = cell[0] + di;
          const int j = cell[1] + dj;
          if (i >= 0 && j >= 0 && i < kernel.resolution[0] && j < kernel.resolution[1] &&
              kernel.member(i, j)) {
            near = true;
          }
        }
      }
    }
    if (!near) report.ok = false;
  }
  report.fraction_inside = samples.empty() ? 0.0 : static_cast<double>(inside) / samples.size();
  return report;
}

ContainmentReport analytic_kernel_contains(const BoundaryState& boundary,
                                           int samples_per_segment) {
  const std::vector<Vector2d> samples = polyline(boundary, samples_per_segment);
  ContainmentReport report;
  int inside = 0;
  for (const Vector2d& x : samples) {
    if (analytic_di_kernel(x)) ++inside;
  }
  report.fraction_inside = samples.empty() ? 0.0 : static_cast<double>(inside) / samples.size();
  report.ok = inside == static_cast<int>(samples.size());
  return report;
}

}  // namespace cise
