#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pvchart {

// One output row in the simulation-table layout. Absent fields are emitted as
// empty cells, never as zeros; ratio = mean/bound when both are present.
struct TableRow {
  std::string scenario;
  std::string chart;
  std::optional<double> alpha;
  std::optional<int> k;
  std::optional<double> lambda;
  std::optional<double> r;
  std::optional<double> beta;
  std::optional<int> n0;
  std::optional<double> delta;
  std::optional<double> rho;
  std::optional<double> mean;
  std::optional<double> std_error;
  std::optional<double> bound;
  std::optional<double> ratio;
  std::optional<double> mean_ooc;
  std::optional<double> mean_fwes;
  std::optional<long long> censored;
};

struct CsvOptions {
  int significant_digits = 6;
  bool full_precision = false;  // overrides digit limits, including the ratio
};

// Header plus one record per row; numbers use up to six significant digits
// and ratios two decimals unless full precision is requested.
void emit_csv(const std::vector<TableRow>& rows, std::ostream& out, CsvOptions options = {});

// Writes to a file path; reports the path on failure.
void emit_csv_file(const std::vector<TableRow>& rows, const std::string& path,
                   CsvOptions options = {});

// Inverse of emit_csv up to formatting precision (used by round-trip tests).
std::vector<TableRow> parse_csv(std::istream& in);

std::string format_number(double v, int significant_digits);

}  // namespace pvchart
