#include "gptd/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gptd {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw IoError(context + ": cannot parse number '" + text + "'");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string axis_spec(const GridAxis& axis) {
  return axis.name + ":" + format_double(axis.lo) + ":" + format_double(axis.hi) + ":" +
         std::to_string(axis.resolution) + ":" + (axis.periodic ? "1" : "0");
}

GridAxis parse_axis(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 5) throw IoError("value grid: malformed axis '" + text + "'");
  GridAxis axis;
  axis.name = parts[0];
  axis.lo = parse_double(parts[1], "value grid axis");
  axis.hi = parse_double(parts[2], "value grid axis");
  axis.resolution = static_cast<Index>(parse_double(parts[3], "value grid axis"));
  axis.periodic = parts[4] == "1";
  return axis;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const Index n = trajectory.num_states();
  const int dim = trajectory.dim();
  for (int d = 0; d < dim; ++d) out << 's' << d << ',';
  out << "reward,gamma\n";
  for (Index i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) out << format_double(trajectory.states(i, d)) << ',';
    if (i + 1 < n)
      out << format_double(trajectory.rewards[i]) << ',' << format_double(trajectory.discounts[i]);
    else
      out << ',';
    out << '\n';
  }
  if (!out) throw IoError("failed writing trajectory CSV");
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("trajectory CSV: missing header");
  strip_cr(line);
  const auto header = split(line, ',');
  if (header.size() < 3 || header[header.size() - 2] != "reward" || header.back() != "gamma")
    throw IoError("trajectory CSV: header must end with reward,gamma");
  const auto dim = static_cast<Index>(header.size() - 2);

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (static_cast<Index>(fields.size()) != dim + 2)
      throw IoError("trajectory CSV: row " + std::to_string(rows.size() + 1) + " has " +
                    std::to_string(fields.size()) + " fields");
    rows.push_back(std::move(fields));
  }
  const auto n = static_cast<Index>(rows.size());
  if (n < 2) throw IoError("trajectory CSV: need at least two states");

  Trajectory traj;
  traj.states.resize(n, dim);
  traj.rewards.resize(n - 1);
  traj.discounts.resize(n - 1);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    const std::string ctx = "trajectory CSV row " + std::to_string(i + 1);
    for (Index d = 0; d < dim; ++d) traj.states(i, d) = parse_double(row[static_cast<std::size_t>(d)], ctx);
    if (i + 1 < n) {
      traj.rewards[i] = parse_double(row[static_cast<std::size_t>(dim)], ctx);
      traj.discounts[i] = parse_double(row[static_cast<std::size_t>(dim + 1)], ctx);
    }
  }
  return traj;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = open_out(path);
  write_trajectory_csv(out, trajectory);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory_csv(in);
}

void write_value_grid_csv(std::ostream& out, const ValueGrid& grid) {
  out << "# first=" << axis_spec(grid.first) << " second=" << axis_spec(grid.second) << '\n';
  out << "x_index,y_index,value\n";
  for (Index i = 0; i < grid.values.rows(); ++i)
    for (Index j = 0; j < grid.values.cols(); ++j)
      out << i << ',' << j << ',' << format_double(grid.values(i, j)) << '\n';
  if (!out) throw IoError("failed writing value grid CSV");
}

ValueGrid read_value_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("value grid CSV: missing axis line");
  strip_cr(line);
  const auto first_at = line.find("first=");
  const auto second_at = line.find(" second=");
  if (line.rfind("# ", 0) != 0 || first_at == std::string::npos || second_at == std::string::npos)
    throw IoError("value grid CSV: malformed axis line");
  ValueGrid grid;
  grid.first = parse_axis(line.substr(first_at + 6, second_at - first_at - 6));
  grid.second = parse_axis(line.substr(second_at + 8));
  if (!std::getline(in, line)) throw IoError("value grid CSV: missing header");
  grid.values = Matrix::Constant(grid.first.resolution, grid.second.resolution,
                                 std::numeric_limits<double>::quiet_NaN());
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw IoError("value grid CSV: expected 3 fields");
    const auto i = static_cast<Index>(parse_double(fields[0], "value grid"));
    const auto j = static_cast<Index>(parse_double(fields[1], "value grid"));
    if (i < 0 || j < 0 || i >= grid.values.rows() || j >= grid.values.cols())
      throw IoError("value grid CSV: index out of range");
    grid.values(i, j) = parse_double(fields[2], "value grid");
  }
  if (!grid.values.allFinite()) throw IoError("value grid CSV: missing or non-finite entries");
  return grid;
}

void write_value_grid_csv(const std::filesystem::path& path, const ValueGrid& grid) {
  auto out = open_out(path);
  write_value_grid_csv(out, grid);
}

ValueGrid read_value_grid_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_value_grid_csv(in);
}

void write_spectrum_csv(const std::filesystem::path& path, const Vector& spectrum) {
  auto out = open_out(path);
  out << "rank,value\n";
  for (Index i = 0; i < spectrum.size(); ++i) out << i + 1 << ',' << format_double(spectrum[i]) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_icd_csv(const std::filesystem::path& path, const std::vector<IcdProfileEntry>& profile) {
  auto out = open_out(path);
  out << "tol,m,frob_error\n";
  for (const auto& e : profile)
    out << format_double(e.tol) << ',' << e.m << ',' << format_double(e.frob_error) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gptd
