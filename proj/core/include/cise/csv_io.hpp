#pragma once

#include <filesystem>
#include <vector>

#include "cise/curve.hpp"
#include "cise/expansion.hpp"
#include "cise/kernel_oracle.hpp"
#include "cise/safety_filter.hpp"

namespace cise {

// Control points as `index,x1,x2` rows in order. Coordinates are printed
// with enough digits that a written boundary reads back bit-identically.
void write_boundary_csv(const std::filesystem::path& path, const BoundaryState& boundary);
BoundaryState read_boundary_csv(const std::filesystem::path& path, double beta = 0.5);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace);

void write_certificates_csv(const std::filesystem::path& path,
                            const std::vector<SegmentCertificate>& certs);

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<SimStep>& traj);

void write_kernel_csv(const std::filesystem::path& path, const GridKernel& kernel);

}  // namespace cise
