#include "pvchart/pvalue_sources.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

namespace pvchart {

namespace {

constexpr double kExactProductCap = 1e4;  // exact tables up to n0*nt of this size

struct MergeScan {
  std::int64_t max_dev;  // max over the path of |i*m - j*n|
  bool has_ties;         // any duplicate in the pooled data
};

MergeScan scan_deviation(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  const std::int64_t m = static_cast<std::int64_t>(b.size());
  MergeScan scan{0, false};
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i] < b[j]))
      v = a[i];
    else
      v = b[j];
    std::size_t di = 0, dj = 0;
    while (i < a.size() && a[i] == v) ++i, ++di;
    while (j < b.size() && b[j] == v) ++j, ++dj;
    if (di + dj > 1) scan.has_ties = true;
    const std::int64_t dev = std::llabs(static_cast<std::int64_t>(i) * m -
                                        static_cast<std::int64_t>(j) * n);
    scan.max_dev = std::max(scan.max_dev, dev);
  }
  return scan;
}

double binomial_total(int n, int m) {
  // Pascal row, cached per (n, m); counts above 2^53 pick up only relative
  // rounding of order 1e-16.
  thread_local std::map<std::pair<int, int>, double> cache;
  const auto key = std::make_pair(std::min(n, m), std::max(n, m));
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const int rows = key.first;
  std::vector<double> row(static_cast<std::size_t>(rows) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n + m; ++i)
    for (int c = std::min(i, rows); c >= 1; --c) row[static_cast<std::size_t>(c)] += row[static_cast<std::size_t>(c - 1)];
  const double total = row[static_cast<std::size_t>(rows)];
  cache[key] = total;
  return total;
}

// Number of lattice paths (0,0) -> (n,m) with |i*m - j*n| <= band at every
// vertex. Only the admissible j-window per column is visited.
double banded_path_count(int n, int m, std::int64_t band) {
  if (band < 0) return 0.0;
  const std::int64_t nn = n, mm = m;
  std::vector<double> dp(static_cast<std::size_t>(m) + 1, 0.0);
  auto j_low = [&](std::int64_t i) {
    const std::int64_t num = i * mm - band;
    return std::max<std::int64_t>(0, (num + nn - 1) / nn > 0 ? (num + nn - 1) / nn : 0);
  };
  auto j_high = [&](std::int64_t i) {
    return std::min<std::int64_t>(mm, (i * mm + band) / nn);
  };
  std::int64_t lo = 0, hi = j_high(0);
  dp[0] = 1.0;
  for (std::int64_t j = 1; j <= hi; ++j) dp[static_cast<std::size_t>(j)] = dp[static_cast<std::size_t>(j - 1)];
  for (std::int64_t i = 1; i <= nn; ++i) {
    const std::int64_t new_lo = j_low(i), new_hi = j_high(i);
    for (std::int64_t j = lo; j < new_lo && j <= hi; ++j) dp[static_cast<std::size_t>(j)] = 0.0;
    for (std::int64_t j = new_lo; j <= new_hi; ++j) {
      double v = (j >= lo && j <= hi) ? dp[static_cast<std::size_t>(j)] : 0.0;
      if (j > new_lo) v += dp[static_cast<std::size_t>(j - 1)];
      dp[static_cast<std::size_t>(j)] = v;
    }
    lo = new_lo;
    hi = new_hi;
  }
  return (mm >= lo && mm <= hi) ? dp[static_cast<std::size_t>(m)] : 0.0;
}

// Null frequencies of the rank-sum statistic U in 0..n*m (Gaussian binomial
// coefficient expansion), with prefix/suffix tails for stable one-sided
// p-values. Tables are immutable once built and shared across threads.
struct UTable {
  std::vector<double> suffix;  // suffix[u] = #outcomes with U >= u
  std::vector<double> prefix;  // prefix[u] = #outcomes with U <= u
  double total;
};

std::shared_ptr<const UTable> u_null_table(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const UTable>> cache;
  const auto key = std::make_pair(std::min(n, m), std::max(n, m));
  {
    std::scoped_lock lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const int nm = n * m;
  std::vector<double> poly(static_cast<std::size_t>(nm) + 1, 0.0);
  poly[0] = 1.0;
  for (int j = 1; j <= std::min(n, m); ++j) {
    const int big = std::max(n, m) + j;
    for (int u = j; u <= nm; ++u) poly[static_cast<std::size_t>(u)] += poly[static_cast<std::size_t>(u - j)];
    for (int u = nm; u >= big; --u) poly[static_cast<std::size_t>(u)] -= poly[static_cast<std::size_t>(u - big)];
  }

  auto table = std::make_shared<UTable>();
  table->suffix.assign(static_cast<std::size_t>(nm) + 2, 0.0);
  table->prefix.assign(static_cast<std::size_t>(nm) + 1, 0.0);
  for (int u = nm; u >= 0; --u)
    table->suffix[static_cast<std::size_t>(u)] =
        table->suffix[static_cast<std::size_t>(u) + 1] + poly[static_cast<std::size_t>(u)];
  double acc = 0.0;
  for (int u = 0; u <= nm; ++u) {
    acc += poly[static_cast<std::size_t>(u)];
    table->prefix[static_cast<std::size_t>(u)] = acc;
  }
  table->total = acc;

  std::scoped_lock lock(mu);
  cache[key] = table;
  return table;
}

struct RankStats {
  double u;        // #{current > baseline} + half-ties
  double tie_sum;  // sum over tie groups of t^3 - t
  bool has_ties;
};

RankStats rank_statistics(const TwoSampleData& data) {
  struct Tagged {
    double v;
    bool current;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(data.baseline.size() + data.current.size());
  for (double v : data.baseline) pooled.push_back({v, false});
  for (double v : data.current) pooled.push_back({v, true});
  std::sort(pooled.begin(), pooled.end(), [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

  RankStats stats{0.0, 0.0, false};
  double rank_sum_current = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].v == pooled[i].v) ++j;
    const double group = static_cast<double>(j - i);
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    if (group > 1.0) {
      stats.has_ties = true;
      stats.tie_sum += group * group * group - group;
    }
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].current) rank_sum_current += mid_rank;
    i = j;
  }
  const double m = static_cast<double>(data.current.size());
  stats.u = rank_sum_current - m * (m + 1.0) / 2.0;
  return stats;
}

void check_nonempty(const TwoSampleData& data) {
  if (data.baseline.empty() || data.current.empty())
    throw std::invalid_argument("both samples must be nonempty");
  for (double v : data.baseline)
    if (!std::isfinite(v)) throw std::invalid_argument("observations must be finite");
  for (double v : data.current)
    if (!std::isfinite(v)) throw std::invalid_argument("observations must be finite");
}

}  // namespace

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Jacobi-theta form converges fast for small arguments.
    const double v = std::exp(-M_PI * M_PI / (8.0 * x * x));
    const double cdf =
        std::sqrt(2.0 * M_PI) / x *
        (v + std::pow(v, 9.0) + std::pow(v, 25.0) + std::pow(v, 49.0));
    return 1.0 - cdf;
  }
  double sf = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 50; ++k) {
    const double term = std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) * x * x);
    sf += 2.0 * sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  return std::clamp(sf, 0.0, 1.0);
}

SourcePValue ks_two_sample_p(const TwoSampleData& data, TestMode mode) {
  check_nonempty(data);
  const int n = static_cast<int>(data.baseline.size());
  const int m = static_cast<int>(data.current.size());
  const MergeScan scan = scan_deviation(data.baseline, data.current);
  const double d_obs =
      static_cast<double>(scan.max_dev) / (static_cast<double>(n) * static_cast<double>(m));

  bool exact = false;
  switch (mode) {
    case TestMode::exact:
      exact = !scan.has_ties;
      break;
    case TestMode::asymptotic:
      exact = false;
      break;
    case TestMode::auto_select:
      exact = !scan.has_ties &&
              static_cast<double>(n) * static_cast<double>(m) <= kExactProductCap;
      break;
  }

  if (exact) {
    const double inside = banded_path_count(n, m, scan.max_dev - 1);
    const double p = 1.0 - inside / binomial_total(n, m);
    return SourcePValue{PValue(std::clamp(p, 0.0, 1.0)), false};
  }

  const double effective = static_cast<double>(n) * static_cast<double>(m) /
                           static_cast<double>(n + m);
  const double p = kolmogorov_sf(std::sqrt(effective) * d_obs);
  return SourcePValue{PValue(p), true};
}

SourcePValue mann_whitney_one_sided_p(const TwoSampleData& data, ShiftDirection direction,
                                      TestMode mode) {
  check_nonempty(data);
  const int n = static_cast<int>(data.baseline.size());
  const int m = static_cast<int>(data.current.size());
  const RankStats stats = rank_statistics(data);

  bool exact = false;
  switch (mode) {
    case TestMode::exact:
      exact = !stats.has_ties;
      break;
    case TestMode::asymptotic:
      exact = false;
      break;
    case TestMode::auto_select:
      exact = !stats.has_ties &&
              static_cast<double>(n) * static_cast<double>(m) <= kExactProductCap;
      break;
  }

  if (exact) {
    const auto table = u_null_table(n, m);
    const int u = static_cast<int>(std::llround(stats.u));
    const int nm = n * m;
    double p;
    if (direction == ShiftDirection::greater)
      p = table->suffix[static_cast<std::size_t>(std::clamp(u, 0, nm))] / table->total;
    else
      p = table->prefix[static_cast<std::size_t>(std::clamp(u, 0, nm))] / table->total;
    return SourcePValue{PValue(std::clamp(p, 0.0, 1.0)), false};
  }

  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  const double big_n = nn + mm;
  const double mu = nn * mm / 2.0;
  double var = nn * mm / 12.0 * (big_n + 1.0 - stats.tie_sum / (big_n * (big_n - 1.0)));
  var = std::max(var, 0.0);
  const double sd = std::sqrt(var);

  double p;
  if (sd == 0.0) {
    const double diff = direction == ShiftDirection::greater ? stats.u - mu : mu - stats.u;
    p = diff > 0.0 ? 0.0 : 1.0;
  } else {
    const double diff = direction == ShiftDirection::greater ? stats.u - mu : mu - stats.u;
    p = norm_sf((diff - 0.5) / sd);
  }
  return SourcePValue{PValue(std::clamp(p, 0.0, 1.0)), true};
}

}  // namespace pvchart
