#include "cise/commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cise/config.hpp"
#include "cise/csv_io.hpp"
#include "cise/kernel_oracle.hpp"
#include "cise/safety_filter.hpp"

namespace cise {
namespace {

namespace fs = std::filesystem;

// Runs the command body and folds every failure into the exit-code contract.
int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPrecondition;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 70;
  }
}

// Missing input files get their own exit code, checked before any parsing.
bool require_file(const fs::path& path, int* code) {
  if (fs::exists(path)) return false;
  std::fprintf(stderr, "error: no such file: %s\n", path.string().c_str());
  *code = kExitMissingFile;
  return true;
}

fs::path snapshot_path(const fs::path& out_dir, int step) {
  char name[32];
  std::snprintf(name, sizeof(name), "boundary_step_%06d.csv", step);
  return out_dir / name;
}

void print_report(const VerificationReport& report) {
  std::printf("segment  b_star        L_b           half_width    margin\n");
  for (const SegmentCertificate& c : report.certificates) {
    std::printf("%-8d %-13.6g %-13.6g %-13.6g %-13.6g %s\n", c.segment, c.b_star, c.l_b_tau,
                c.half_width, c.margin, c.margin >= 0.0 ? "" : "FAIL");
  }
  std::printf("min margin: %.6g\n", report.min_margin);
}

const char* status_name(ExpansionStatus s) {
  switch (s) {
    case ExpansionStatus::converged:
      return "converged";
    case ExpansionStatus::converged_by_fallback:
      return "converged (step-size floor)";
    default:
      return "max steps reached";
  }
}

}  // namespace

int cmd_expand(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&]() -> int {
    int code = 0;
    if (require_file(config_path, &code)) return code;
    const RunConfig cfg = load_config(config_path);
    const SystemModel sys = configured_system(cfg);
    const ExpansionConfig ec = expansion_config(cfg);
    fs::create_directories(out_dir);

    ExpansionObserver observer = nullptr;
    if (cfg.snapshot_every > 0) {
      observer = [&](const BoundaryState& b, const TraceEntry& e) {
        if (e.step % cfg.snapshot_every == 0) write_boundary_csv(snapshot_path(out_dir, e.step), b);
      };
    }
    const ExpansionResult result = expand(sys, ec, observer);

    write_trace_csv(out_dir / "trace.csv", result.trace);
    write_boundary_csv(out_dir / "boundary_final.csv", result.boundary);
    const VerificationReport report = verify(sys, result.boundary, ec.eval);
    write_certificates_csv(out_dir / "certificates.csv", report.certificates);

    const TraceEntry& first = result.trace.front();
    const TraceEntry& last = result.trace.back();
    std::printf("system: %s\n", sys.name().c_str());
    std::printf("status: %s after %d accepted steps (%d QP solves, max KKT residual %.3g)\n",
                status_name(result.status), last.step, result.qp_solves, result.max_qp_residual);
    std::printf("area: %.6g -> %.6g\n", first.area, last.area);
    std::printf("final min margin: %.6g\n", report.min_margin);
    if (!report.all_pass) {
      std::printf("final boundary FAILED verification (%zu segments)\n",
                  report.failing_segments.size());
      return kExitVerificationFailed;
    }
    return kExitOk;
  });
}

int cmd_verify(const fs::path& config_path, const fs::path& boundary_csv) {
  return guarded([&]() -> int {
    int code = 0;
    if (require_file(config_path, &code)) return code;
    if (require_file(boundary_csv, &code)) return code;
    const RunConfig cfg = load_config(config_path);
    const SystemModel sys = configured_system(cfg);
    const ExpansionConfig ec = expansion_config(cfg);
    const BoundaryState boundary = read_boundary_csv(boundary_csv, cfg.beta);

    const VerificationReport report = verify(sys, boundary, ec.eval);
    print_report(report);

    bool contained = true;
    if (ec.enforce_containment) {
      contained = containment_check(boundary, ec.safe_box);
      std::printf("containment in safe set: %s\n", contained ? "ok" : "VIOLATED");
    }
    if (report.all_pass && contained) {
      std::printf("verification PASSED\n");
      return kExitOk;
    }
    std::printf("verification FAILED\n");
    return kExitVerificationFailed;
  });
}

int cmd_simulate(const fs::path& config_path, const fs::path& boundary_csv, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed_override) {
  return guarded([&]() -> int {
    int code = 0;
    if (require_file(config_path, &code)) return code;
    if (require_file(boundary_csv, &code)) return code;
    const RunConfig cfg = load_config(config_path);
    const SystemModel sys = configured_system(cfg);
    const ExpansionConfig ec = expansion_config(cfg);
    const BoundaryState boundary = read_boundary_csv(boundary_csv, cfg.beta);

    const VerificationReport report = verify(sys, boundary, ec.eval);
    const bool contained = !ec.enforce_containment || containment_check(boundary, ec.safe_box);
    if (!report.all_pass || !contained) {
      throw PreconditionError("boundary fails verification; refusing to simulate");
    }
    fs::create_directories(out_dir);

    FilterConfig fc;
    fc.gamma = cfg.filter_gamma;
    fc.k_s = cfg.k_s;
    SdfEvaluator sdf(boundary, fc.samples_per_segment);

    // Sampling box: axis-aligned hull of a dense boundary polyline.
    Vector2d lo = Vector2d::Constant(std::numeric_limits<double>::infinity());
    Vector2d hi = -lo;
    for (const Vector2d& p : polyline(boundary, 32)) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }

    const std::uint64_t seed = seed_override.value_or(cfg.seed);
    std::mt19937_64 rng(seed);
    const auto uniform01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    const auto uniform = [&](double a, double b) { return a + (b - a) * uniform01(); };

    std::printf("simulating %d trajectories (seed %" PRIu64 ", horizon %g, dt %g)\n",
                cfg.trajectories, seed, cfg.horizon, cfg.dt_sim);
    double worst_h = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.trajectories; ++k) {
      Vector2d x0;
      do {
        x0.x() = uniform(lo.x(), hi.x());
        x0.y() = uniform(lo.y(), hi.y());
      } while (sdf(x0).h <= 0.0);
      VectorXd u_ref(sys.input_dim());
      for (int d = 0; d < sys.input_dim(); ++d) {
        u_ref[d] = uniform(sys.u_min()[d], sys.u_max()[d]);
      }
      const RefPolicy policy = [&u_ref](double, const Vector2d&) { return u_ref; };
      const std::vector<SimStep> traj =
          simulate(boundary, sys, x0, policy, cfg.horizon, cfg.dt_sim, fc);
      double min_h = std::numeric_limits<double>::infinity();
      for (const SimStep& s : traj) min_h = std::min(min_h, s.h);
      worst_h = std::min(worst_h, min_h);
      char name[32];
      std::snprintf(name, sizeof(name), "trajectory_%03d.csv", k);
      write_trajectory_csv(out_dir / name, traj);
      std::printf("trajectory %3d: x0 = (%9.5f, %9.5f), u_ref = %9.5f, min h = %.6g\n", k, x0.x(),
                  x0.y(), u_ref[0], min_h);
    }
    std::printf("worst-case h across all runs: %.6g\n", worst_h);
    if (worst_h < -1e-3) {
      std::printf("safety VIOLATED\n");
      return kExitVerificationFailed;
    }
    return kExitOk;
  });
}

int cmd_kernel(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&]() -> int {
    int code = 0;
    if (require_file(config_path, &code)) return code;
    const RunConfig cfg = load_config(config_path);
    const SystemModel sys = configured_system(cfg);
    fs::create_directories(out_dir);

    const GridKernel kernel = viability_kernel(sys, cfg.safe_box, {cfg.resolution, cfg.resolution},
                                               cfg.input_samples, cfg.dt_k);
    write_kernel_csv(out_dir / "kernel.csv", kernel);

    const long members = std::count(kernel.membership.begin(), kernel.membership.end(), 1);
    const Vector2d cell = kernel.cell_size();
    std::printf("system: %s\n", sys.name().c_str());
    std::printf("kernel: %ld of %zu cells viable, area %.6g\n", members, kernel.membership.size(),
                static_cast<double>(members) * cell.x() * cell.y());
    return kExitOk;
  });
}

int cmd_sdf(const fs::path& config_path, const fs::path& boundary_csv, const fs::path& out_dir) {
  return guarded([&]() -> int {
    int code = 0;
    if (require_file(config_path, &code)) return code;
    if (require_file(boundary_csv, &code)) return code;
    const RunConfig cfg = load_config(config_path);
    const BoundaryState boundary = read_boundary_csv(boundary_csv, cfg.beta);
    fs::create_directories(out_dir);

    SdfEvaluator sdf(boundary);
    FILE* f = std::fopen((out_dir / "sdf.csv").c_str(), "w");
    if (!f) throw DataError("cannot open " + (out_dir / "sdf.csv").string() + " for writing");
    std::fprintf(f, "x1,x2,h\n");
    const Vector2d span = cfg.safe_box.hi - cfg.safe_box.lo;
    for (int j = 0; j < cfg.resolution; ++j) {
      for (int i = 0; i < cfg.resolution; ++i) {
        const double x1 = cfg.safe_box.lo.x() + span.x() * (i + 0.5) / cfg.resolution;
        const double x2 = cfg.safe_box.lo.y() + span.y() * (j + 0.5) / cfg.resolution;
        std::fprintf(f, "%.17g,%.17g,%.17g\n", x1, x2, sdf(Vector2d(x1, x2)).h);
      }
    }
    std::fclose(f);
    std::printf("wrote %dx%d SDF grid\n", cfg.resolution, cfg.resolution);
    return kExitOk;
  });
}

}  // namespace cise
