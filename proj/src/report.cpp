#include "pvchart/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pvchart {

namespace {

const char* kHeader =
    "scenario,chart,alpha,k,lambda,r,beta,n0,delta,rho,mean,std_error,bound,ratio,mean_ooc,"
    "mean_fwes,censored";

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

template <typename T>
std::optional<T> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::istringstream is(s);
  T v;
  is >> v;
  if (is.fail()) throw std::runtime_error("malformed numeric field: " + s);
  return v;
}

}  // namespace

std::string format_number(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

void emit_csv(const std::vector<TableRow>& rows, std::ostream& out, CsvOptions options) {
  const int digits = options.full_precision ? 17 : options.significant_digits;
  auto num = [&](const std::optional<double>& v) {
    return v ? format_number(*v, digits) : std::string();
  };
  auto ratio_cell = [&](const std::optional<double>& v) -> std::string {
    if (!v) return {};
    if (options.full_precision) return format_number(*v, 17);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", *v);
    return buf;
  };
  auto int_cell = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };

  out << kHeader << '\n';
  for (const TableRow& row : rows) {
    out << quote_if_needed(row.scenario) << ',' << quote_if_needed(row.chart) << ','
        << num(row.alpha) << ',' << int_cell(row.k) << ',' << num(row.lambda) << ','
        << num(row.r) << ',' << num(row.beta) << ',' << int_cell(row.n0) << ','
        << num(row.delta) << ',' << num(row.rho) << ',' << num(row.mean) << ','
        << num(row.std_error) << ',' << num(row.bound) << ',' << ratio_cell(row.ratio) << ','
        << num(row.mean_ooc) << ',' << num(row.mean_fwes) << ',' << int_cell(row.censored)
        << '\n';
  }
}

void emit_csv_file(const std::vector<TableRow>& rows, const std::string& path,
                   CsvOptions options) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  emit_csv(rows, out, options);
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

std::vector<TableRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing CSV header");
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_record(line);
    if (f.size() != 17) throw std::runtime_error("unexpected field count in row: " + line);
    TableRow row;
    row.scenario = f[0];
    row.chart = f[1];
    row.alpha = parse_opt<double>(f[2]);
    row.k = parse_opt<int>(f[3]);
    row.lambda = parse_opt<double>(f[4]);
    row.r = parse_opt<double>(f[5]);
    row.beta = parse_opt<double>(f[6]);
    row.n0 = parse_opt<int>(f[7]);
    row.delta = parse_opt<double>(f[8]);
    row.rho = parse_opt<double>(f[9]);
    row.mean = parse_opt<double>(f[10]);
    row.std_error = parse_opt<double>(f[11]);
    row.bound = parse_opt<double>(f[12]);
    row.ratio = parse_opt<double>(f[13]);
    row.mean_ooc = parse_opt<double>(f[14]);
    row.mean_fwes = parse_opt<double>(f[15]);
    row.censored = parse_opt<long long>(f[16]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pvchart
