#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gptd/envs/value_grid.hpp"
#include "gptd/eval.hpp"
#include "gptd/gptd.hpp"

namespace gptd {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

// Trajectory CSV: header "s0,...,s{D-1},reward,gamma"; one row per state.
// The final state has empty reward and gamma fields.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory_csv(std::istream& in);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// ValueGrid CSV: a "# first=name:lo:hi:resolution:periodic second=..." line
// naming the axis ranges, then "x_index,y_index,value" rows.
void write_value_grid_csv(std::ostream& out, const ValueGrid& grid);
ValueGrid read_value_grid_csv(std::istream& in);
void write_value_grid_csv(const std::filesystem::path& path, const ValueGrid& grid);
ValueGrid read_value_grid_csv(const std::filesystem::path& path);

// eigenspectrum.csv: "rank,value" with rank starting at 1.
void write_spectrum_csv(const std::filesystem::path& path, const Vector& spectrum);
// icd.csv: "tol,m,frob_error".
void write_icd_csv(const std::filesystem::path& path, const std::vector<IcdProfileEntry>& profile);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gptd
