#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cise/curve.hpp"
#include "cise/dynamics.hpp"

namespace cise {

// Grid under-approximation of the set of states from which the system can
// stay inside the safe box forever, computed by removing cells until no
// sampled input keeps the one-step image inside the surviving set.
struct GridKernel {
  StateBox safe_box;
  std::array<int, 2> resolution{0, 0};
  std::vector<std::uint8_t> membership;
  int input_samples = 0;

  bool member(int i, int j) const {
    return membership[static_cast<size_t>(j) * resolution[0] + static_cast<size_t>(i)] != 0;
  }
  Vector2d cell_size() const {
    return (safe_box.hi - safe_box.lo).cwiseQuotient(
        Vector2d(resolution[0], resolution[1]));
  }
  Vector2d cell_center(int i, int j) const {
    return safe_box.lo + cell_size().cwiseProduct(Vector2d(i + 0.5, j + 0.5));
  }
  // Cell indices holding x, or {-1, -1} outside the safe box.
  std::array<int, 2> locate(const Vector2d& x) const;
};

GridKernel viability_kernel(const SystemModel& sys, const StateBox& safe_box,
                            std::array<int, 2> resolution, int input_samples, double dt_k);

// Closed form for the double integrator with |p| <= 1, |u| <= 1: from (p, v)
// the hardest brake sweeps v^2/2 of position before standstill, which must
// not leave the band.
bool analytic_di_kernel(const Vector2d& x);

struct ContainmentReport {
  double fraction_inside = 0.0;
  bool ok = false;
};

// Dense boundary samples against the grid kernel. fraction_inside counts
// samples whose own cell is a member; ok requires every sample to have a
// member cell within margin_cells (Chebyshev distance).
ContainmentReport kernel_contains(const GridKernel& kernel, const BoundaryState& boundary,
                                  int margin_cells, int samples_per_segment = 32);

// Same check against the closed-form double-integrator kernel; exact, no grid.
ContainmentReport analytic_kernel_contains(const BoundaryState& boundary,
                                           int samples_per_segment = 32);

}  // namespace cise
