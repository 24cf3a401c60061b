#include "wonham/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wonham::csv {

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

double parse_real(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::Io, "line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

// Reads the header and returns rows of parsed reals; every row must have the
// header's width.
std::vector<std::vector<double>> read_table(std::istream& in, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "missing CSV header");
  header = split(line);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " columns");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_real(f, lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_observations(std::ostream& out, const ObservationGrid& grid) {
  out << "k,t_k,delta_y\n";
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    out << k << ',' << format_real(grid.time(k)) << ',' << format_real(grid.increments[k]) << '\n';
  }
}

ObservationGrid read_observations(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = read_table(in, header);
  if (header != std::vector<std::string>{"k", "t_k", "delta_y"}) {
    throw Error(ErrorCode::Io, "observation CSV header must be k,t_k,delta_y");
  }
  if (rows.size() < 2) throw Error(ErrorCode::Io, "observation CSV needs at least two rows");
  ObservationGrid grid;
  grid.step = rows[1][1] - rows[0][1];
  for (const auto& row : rows) grid.increments.push_back(row[2]);
  return grid;
}

void write_trajectory(std::ostream& out, const FilterTrajectory& trajectory) {
  const std::size_t d = trajectory.values.empty() ? 0 : trajectory.values.front().dim();
  out << 't';
  for (std::size_t i = 1; i <= d; ++i) out << ",pi_" << i;
  out << '\n';
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    out << format_real(trajectory.time(k));
    for (std::size_t i = 0; i < d; ++i) out << ',' << format_real(trajectory.values[k][i]);
    out << '\n';
  }
}

FilterTrajectory read_trajectory(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = read_table(in, header);
  if (header.size() < 2 || header.front() != "t") {
    throw Error(ErrorCode::Io, "trajectory CSV header must be t,pi_1..pi_d");
  }
  FilterTrajectory trajectory;
  trajectory.step = rows.size() >= 2 ? rows[1][0] - rows[0][0] : 0.0;
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  for (const auto& row : rows) {
    Vector w(d);
    for (Eigen::Index i = 0; i < d; ++i) w(i) = row[static_cast<std::size_t>(i) + 1];
    trajectory.values.push_back(ProbabilitySimplex::from_normalized(std::move(w)));
  }
  return trajectory;
}

void write_smoothing(std::ostream& out, const SmoothingTrajectory& rho) {
  out << "t,j,i,rho\n";
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const std::string t = format_real(rho.time(k));
    const Matrix& m = rho.matrices[k];
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      for (Eigen::Index i = 0; i < m.cols(); ++i) {
        out << t << ',' << j + 1 << ',' << i + 1 << ',' << format_real(m(j, i)) << '\n';
      }
    }
  }
}

void write_diagnostics(std::ostream& out, const SpreadDiagnostics& diag) {
  out << "t,j,rho_min,rho_max,spread\n";
  for (std::size_t k = 0; k < diag.size(); ++k) {
    const std::string t = format_real(diag.time(k));
    for (std::size_t j = 0; j < diag.dim; ++j) {
      const RowSpread& row = diag.at(k, j);
      out << t << ',' << j + 1 << ',' << format_real(row.rho_min) << ','
          << format_real(row.rho_max) << ',' << format_real(row.spread()) << '\n';
    }
  }
}

void write_signal(std::ostream& out, const SignalPath& path) {
  out << "segment,t_start,state\n";
  for (std::size_t k = 0; k < path.segments(); ++k) {
    out << k << ',' << format_real(path.segment_start(k)) << ',' << path.states[k] + 1 << '\n';
  }
}

void write_replicate(std::ostream& out, const ReplicateReport& report) {
  out << "t,D_t,B_t,spread_max,bayes_residual\n";
  for (std::size_t k = 0; k < report.distance.size(); ++k) {
    out << format_real(report.step * static_cast<double>(k)) << ','
        << format_real(report.distance[k]) << ',' << format_real(report.bound[k]) << ','
        << format_real(report.spread_max[k]) << ',' << format_real(report.bayes_residual[k])
        << '\n';
  }
}

}  // namespace wonham::csv
