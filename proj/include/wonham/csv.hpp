#pragma once

// CSV import/export. Reals are written with 17 significant digits and '.'
// as the decimal separator.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "wonham/filter.hpp"
#include "wonham/observation.hpp"
#include "wonham/smoothing.hpp"
#include "wonham/stability.hpp"

namespace wonham::csv {

std::string format_real(double x);

/// Columns: k, t_k, delta_y.
void write_observations(std::ostream& out, const ObservationGrid& grid);
ObservationGrid read_observations(std::istream& in);

/// Columns: t, pi_1..pi_d.
void write_trajectory(std::ostream& out, const FilterTrajectory& trajectory);
FilterTrajectory read_trajectory(std::istream& in);

/// Columns: t, j, i, rho (1-based state indices).
void write_smoothing(std::ostream& out, const SmoothingTrajectory& rho);

/// Columns: t, j, rho_min, rho_max, spread.
void write_diagnostics(std::ostream& out, const SpreadDiagnostics& diag);

/// Columns: segment, t_start, state (1-based state index).
void write_signal(std::ostream& out, const SignalPath& path);

/// Columns: t, D_t, B_t, spread_max, bayes_residual.
void write_replicate(std::ostream& out, const ReplicateReport& report);

/// Opens `path` for writing and runs `fn(stream)`; throws Error(Io).
template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn);

}  // namespace wonham::csv

#include <fstream>

template <class Fn>
void wonham::csv::write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}
