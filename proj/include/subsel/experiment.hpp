#pragma once

// Sweep harness: repeated random instances, every algorithm on the same
// instance per (k, trial) cell, one CSV record per algorithm run.

#include "subsel/baselines.hpp"
#include "subsel/generators.hpp"
#include "subsel/selection.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

namespace subsel {

enum class Generator { coe, graph };
enum class Algorithm { spectral_selection_heuristic, spectral_selection_principled, random_columns };

inline std::string_view to_string(Generator g) { return g == Generator::coe ? "coe" : "graph"; }

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::spectral_selection_heuristic: return "spectral_selection_heuristic";
    case Algorithm::spectral_selection_principled: return "spectral_selection_principled";
    case Algorithm::random_columns: return "random_columns";
  }
  return "unknown";
}

inline std::optional<Generator> parse_generator(std::string_view s) {
  if (s == "coe") return Generator::coe;
  if (s == "graph") return Generator::graph;
  return std::nullopt;
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::spectral_selection_heuristic,
                      Algorithm::spectral_selection_principled, Algorithm::random_columns}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

/// "20,50,100" or "lo:hi:step" (inclusive of hi when it lies on the grid).
inline std::vector<int> parse_k_values(std::string_view text) {
  auto to_int = [&](std::string_view part) {
    const std::string s(part);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) {
      throw std::invalid_argument("bad k value '" + s + "' in '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<int> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<int> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(to_int(text.substr(start, colon - start)));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
      throw std::invalid_argument("k range must be lo:hi:step with lo <= hi, step > 0");
    }
    for (int k = parts[0]; k <= parts[1]; k += parts[2]) out.push_back(k);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(to_int(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool is_spectral(Algorithm a) { return a != Algorithm::random_columns; }

struct ExperimentConfig {
  Generator generator = Generator::coe;
  std::vector<Algorithm> algorithms;
  int m = 0;
  int n = 0;
  std::vector<int> k_values;
  int trials = 1;
  std::uint64_t base_seed = 0;
  /// Empty: keep records in memory only.
  std::string output_path;
  int parallelism = 1;
};

struct ExperimentRecord {
  std::string generator;
  std::string algorithm;
  int m = 0;
  int n = 0;
  int k = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  /// ||X^+||_2 / ||X_S^+||_2, 0 for a singular selection, NaN for a failed run.
  double metric = 0.0;
  /// 1 / sqrt(bound_tight(m, k, n)).
  double bound_metric = 0.0;
  double runtime_ms = 0.0;
  /// Empty for successful runs. Not part of the CSV.
  std::string error;
};

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("experiment config: " + what); };
  if (c.m < 1 || c.n < c.m) fail("need 1 <= m <= n");
  if (c.k_values.empty()) fail("no k values");
  if (c.algorithms.empty()) fail("no algorithms");
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.parallelism < 1) fail("jobs must be >= 1");
  const auto [kmin, kmax] = std::minmax_element(c.k_values.begin(), c.k_values.end());
  if (*kmin < c.m || *kmax > c.n) fail("k values must lie in [m, n]");
}

/// Selection routine behind an algorithm name: (X, k, seed) -> columns.
using Selector = std::function<std::vector<Index>(const Matrix&, int, RngSeed)>;

inline Selector selector_for(Algorithm a) {
  switch (a) {
    case Algorithm::spectral_selection_heuristic:
      return [](const Matrix& X, int k, RngSeed) {
        return select(X, SelectionConfig{k, Strategy::heuristic, false}).indices;
      };
    case Algorithm::spectral_selection_principled:
      return [](const Matrix& X, int k, RngSeed) {
        return select(X, SelectionConfig{k, Strategy::principled, false}).indices;
      };
    case Algorithm::random_columns:
      return [](const Matrix& X, int k, RngSeed seed) {
        return random_subset(X.cols(), k, baseline_seed(seed.seed));
      };
  }
  throw std::invalid_argument("selector_for: unknown algorithm");
}

inline Matrix generate_instance(Generator g, int m, int n, RngSeed seed) {
  if (g == Generator::coe) return orthonormal_rows(m, n, seed);
  return graph_instance(m, n, seed, EdgeMultiplicity::balanced).X;
}

inline Matrix select_columns(const Matrix& X, const std::vector<Index>& cols) {
  Matrix out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = X.col(cols[c]);
  return out;
}

/// sigma_min(X_S) / sigma_min(X); 0 when X_S is singular.
inline double selection_metric(const Matrix& X, const std::vector<Index>& cols,
                               double sigma_min_full) {
  const SingularValueSummary sv = smallest_singular_value(select_columns(X, cols));
  if (sv.singular) return 0.0;
  return sv.sigma_min / sigma_min_full;
}

inline constexpr std::string_view kCsvHeader =
    "generator,algorithm,m,n,k,trial,seed,metric,bound_metric,runtime_ms";

inline std::string format_real(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv_line(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.generator << ',' << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.k << ','
     << r.trial << ',' << r.seed << ',' << format_real(r.metric) << ','
     << format_real(r.bound_metric) << ',' << format_real(r.runtime_ms);
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) os << to_csv_line(r) << '\n';
}

inline std::vector<ExperimentRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw std::runtime_error("read_csv: missing or unexpected header");
  }
  std::vector<ExperimentRecord> out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      throw std::runtime_error("read_csv: line " + std::to_string(line_no) + " has " +
                               std::to_string(f.size()) + " fields, expected 10");
    }
    auto real = [](const std::string& s) {
      return s == "NaN" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    ExperimentRecord r;
    r.generator = f[0];
    r.algorithm = f[1];
    r.m = std::stoi(f[2]);
    r.n = std::stoi(f[3]);
    r.k = std::stoi(f[4]);
    r.trial = std::stoi(f[5]);
    r.seed = std::stoull(f[6]);
    r.metric = real(f[7]);
    r.bound_metric = real(f[8]);
    r.runtime_ms = real(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

inline void sort_records(std::vector<ExperimentRecord>& records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.generator, a.algorithm, a.m, a.n, a.k, a.trial) <
           std::tie(b.generator, b.algorithm, b.m, b.n, b.k, b.trial);
  });
}

/// Runs every algorithm on one (k, trial) cell.
inline std::vector<ExperimentRecord> run_cell(const ExperimentConfig& c, int k, int trial) {
  const std::uint64_t seed = c.base_seed + static_cast<std::uint64_t>(trial);
  const double bound_metric = 1.0 / std::sqrt(bound_tight(c.m, k, c.n));
  std::vector<ExperimentRecord> out;
  auto record = [&](Algorithm a) {
    ExperimentRecord r;
    r.generator = std::string(to_string(c.generator));
    r.algorithm = std::string(to_string(a));
    r.m = c.m;
    r.n = c.n;
    r.k = k;
    r.trial = trial;
    r.seed = seed;
    r.bound_metric = bound_metric;
    return r;
  };

  Matrix X;
  double sigma_full = 0.0;
  try {
    X = generate_instance(c.generator, c.m, c.n, RngSeed{seed});
    sigma_full = smallest_singular_value(X).sigma_min;
  } catch (const std::exception& e) {
    for (Algorithm a : c.algorithms) {
      ExperimentRecord r = record(a);
      r.metric = std::numeric_limits<double>::quiet_NaN();
      r.runtime_ms = std::numeric_limits<double>::quiet_NaN();
      r.error = std::string("generator: ") + e.what();
      out.push_back(std::move(r));
    }
    return out;
  }

  for (Algorithm a : c.algorithms) {
    ExperimentRecord r = record(a);
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<Index> cols = selector_for(a)(X, k, RngSeed{seed});
      const auto t1 = std::chrono::steady_clock::now();
      r.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      r.metric = selection_metric(X, cols, sigma_full);
    } catch (const std::exception& e) {
      r.metric = std::numeric_limits<double>::quiet_NaN();
      r.runtime_ms = std::numeric_limits<double>::quiet_NaN();
      r.error = std::string(dynamic_cast<const InvariantError*>(&e) ? "invariant: " : "error: ") +
                e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// All (k, trial) cells over a pool of `parallelism` workers. Records are
/// appended to `<output_path>.partial` as cells finish, then written sorted
/// to `output_path`.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& c) {
  validate(c);
  std::vector<std::pair<int, int>> cells;
  for (int k : c.k_values)
    for (int t = 0; t < c.trials; ++t) cells.emplace_back(k, t);

  std::ofstream partial;
  const std::string partial_path = c.output_path.empty() ? "" : c.output_path + ".partial";
  if (!partial_path.empty()) {
    partial.open(partial_path);
    if (!partial) throw std::runtime_error("cannot open " + partial_path + " for writing");
    partial << kCsvHeader << '\n';
  }

  std::vector<ExperimentRecord> records;
  std::mutex sink;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      std::vector<ExperimentRecord> rs = run_cell(c, cells[i].first, cells[i].second);
      std::lock_guard lock(sink);
      for (auto& r : rs) {
        if (partial.is_open()) partial << to_csv_line(r) << '\n';
        records.push_back(std::move(r));
      }
      if (partial.is_open()) partial.flush();
    }
  };
  const int workers = std::min<int>(c.parallelism, static_cast<int>(cells.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  sort_records(records);
  if (!c.output_path.empty()) {
    partial.close();
    std::ofstream out(c.output_path);
    if (!out) throw std::runtime_error("cannot open " + c.output_path + " for writing");
    write_csv(out, records);
    if (!out) throw std::runtime_error("write failed: " + c.output_path);
    out.close();
    std::filesystem::remove(partial_path);
  }
  return records;
}

/// Human-readable descriptions of every record that breaks a harness
/// invariant: a failed spectral run, a spectral metric below its guarantee,
/// or any metric above 1.
inline std::vector<std::string> find_breaches(const std::vector<ExperimentRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    const std::string where = r.generator + "/" + r.algorithm + " k=" + std::to_string(r.k) +
                              " trial=" + std::to_string(r.trial);
    const bool spectral = r.algorithm != to_string(Algorithm::random_columns);
    if (!r.error.empty()) {
      if (spectral || r.error.rfind("invariant", 0) == 0) out.push_back(where + ": " + r.error);
      continue;
    }
    if (spectral && !(r.metric >= r.bound_metric * (1.0 - 1e-9))) {
      out.push_back(where + ": metric " + format_real(r.metric) + " below bound " +
                    format_real(r.bound_metric));
    }
    if (r.metric > 1.0 + 1e-9) {
      out.push_back(where + ": metric " + format_real(r.metric) + " exceeds 1");
    }
  }
  return out;
}

struct SummaryRow {
  std::string generator;
  std::string algorithm;
  int k = 0;
  int count = 0;
  int failed = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double bound_metric = 0.0;
};

/// Mean, sample standard deviation and minimum of the metric per
/// (generator, algorithm, k). Failed (NaN) records are counted, not averaged.
inline std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[{r.generator, r.algorithm, r.k}].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [key, rs] : groups) {
    SummaryRow row;
    std::tie(row.generator, row.algorithm, row.k) = key;
    row.bound_metric = rs.front()->bound_metric;
    row.min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto* r : rs) {
      if (std::isnan(r->metric)) {
        ++row.failed;
        continue;
      }
      ++row.count;
      sum += r->metric;
      row.min = std::min(row.min, r->metric);
    }
    if (row.count == 0) {
      row.mean = row.stddev = row.min = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.mean = sum / row.count;
      double ss = 0.0;
      for (const auto* r : rs)
        if (!std::isnan(r->metric)) ss += (r->metric - row.mean) * (r->metric - row.mean);
      row.stddev = row.count > 1 ? std::sqrt(ss / (row.count - 1)) : 0.0;
    }
    out.push_back(row);
  }
  return out;
}

inline std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::size_t algo_width = 9;
  for (const auto& r : rows) algo_width = std::max(algo_width, r.algorithm.size());
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-9s %-*s %6s %6s %10s %10s %10s %12s\n", "generator",
                static_cast<int>(algo_width), "algorithm", "k", "runs", "mean", "std", "min",
                "bound_metric");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-9s %-*s %6d %6d %10.6f %10.6f %10.6f %12.6f%s\n",
                  r.generator.c_str(), static_cast<int>(algo_width), r.algorithm.c_str(), r.k,
                  r.count, r.mean, r.stddev, r.min, r.bound_metric,
                  r.failed ? ("  (" + std::to_string(r.failed) + " failed)").c_str() : "");
    out += buf;
  }
  return out;
}

}  // namespace subsel
