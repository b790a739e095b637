#include "cise/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace cise {
namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_out(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw DataError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  return FilePtr(f, &std::fclose);
}

// Strict double parse: the whole field must be consumed.
double parse_double(const std::string& field, const std::filesystem::path& path, size_t line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(field.c_str(), &end);
  if (errno != 0 || end != field.c_str() + field.size() || field.empty()) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_boundary_csv(const std::filesystem::path& path, const BoundaryState& boundary) {
  FilePtr f = open_out(path);
  std::fprintf(f.get(), "index,x1,x2\n");
  for (int i = 0; i < boundary.size(); ++i) {
    std::fprintf(f.get(), "%d,%.17g,%.17g\n", i, boundary.point(i).x(), boundary.point(i).y());
  }
}

BoundaryState read_boundary_csv(const std::filesystem::path& path, double beta) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,x1,x2") {
    throw DataError(path.string() + ": expected header 'index,x1,x2', got '" + line + "'");
  }
  std::vector<Vector2d> pts;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
    }
    const double idx = parse_double(fields[0], path, lineno);
    if (idx != static_cast<double>(pts.size())) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": index out of order");
    }
    pts.emplace_back(parse_double(fields[1], path, lineno), parse_double(fields[2], path, lineno));
  }
  try {
    return BoundaryState(std::move(pts), beta);
  } catch (const ContractError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceEntry>& trace) {
  FilePtr f = open_out(path);
  std::fprintf(f.get(), "step,area,min_margin,dt\n");
  for (const TraceEntry& e : trace) {
    std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g\n", e.step, e.area, e.min_margin, e.dt);
  }
}

void write_certificates_csv(const std::filesystem::path& path,
                            const std::vector<SegmentCertificate>& certs) {
  FilePtr f = open_out(path);
  const Eigen::Index l = certs.empty() ? 0 : certs.front().u_star.size();
  std::fprintf(f.get(), "segment,b_star,L_b,half_width,margin");
  for (Eigen::Index k = 0; k < l; ++k) std::fprintf(f.get(), ",u_star%d", static_cast<int>(k) + 1);
  std::fprintf(f.get(), "\n");
  for (const SegmentCertificate& c : certs) {
    std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g,%.17g", c.segment, c.b_star, c.l_b_tau,
                 c.half_width, c.margin);
    for (Eigen::Index k = 0; k < c.u_star.size(); ++k) {
      std::fprintf(f.get(), ",%.17g", c.u_star[k]);
    }
    std::fprintf(f.get(), "\n");
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<SimStep>& traj) {
  FilePtr f = open_out(path);
  const Eigen::Index l = traj.empty() ? 0 : traj.front().u.size();
  std::fprintf(f.get(), "t,x1,x2");
  for (Eigen::Index k = 0; k < l; ++k) std::fprintf(f.get(), ",u%d", static_cast<int>(k) + 1);
  std::fprintf(f.get(), ",delta,h\n");
  for (const SimStep& s : traj) {
    std::fprintf(f.get(), "%.17g,%.17g,%.17g", s.t, s.x.x(), s.x.y());
    for (Eigen::Index k = 0; k < s.u.size(); ++k) std::fprintf(f.get(), ",%.17g", s.u[k]);
    std::fprintf(f.get(), ",%.17g,%.17g\n", s.delta, s.h);
  }
}

void write_kernel_csv(const std::filesystem::path& path, const GridKernel& kernel) {
  FilePtr f = open_out(path);
  std::fprintf(f.get(), "i,j,x1,x2,member\n");
  for (int j = 0; j < kernel.resolution[1]; ++j) {
    for (int i = 0; i < kernel.resolution[0]; ++i) {
      const Vector2d c = kernel.cell_center(i, j);
      std::fprintf(f.get(), "%d,%d,%.17g,%.17g,%d\n", i, j, c.x(), c.y(),
                   kernel.member(i, j) ? 1 : 0);
    }
  }
}

}  // namespace cise
