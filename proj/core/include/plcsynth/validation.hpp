#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcsynth/metrics.hpp"

namespace plcsynth {

enum class MetricId { acg_db, rms_ds_us, cb_khz, kappa_db, capacity_gbps };

std::string_view to_string(MetricId id);

// Target statistics of one metric with the accepted deviations. The mean
// tolerance is absolute; the std tolerance is relative to the target std.
struct MetricTarget {
  MetricId metric;
  double mean;
  double std;
  double mean_tolerance;
  double std_tolerance_rel;
  bool informational = false;
};

struct TargetSet {
  std::string name;
  std::vector<MetricTarget> rows;

  // table3-synthetic, table3-experimental, table3-not-fully-synthetic,
  // table4-siso, table4-2x2 (and the 2x2/SISO experimental columns).
  static TargetSet builtin(std::string_view name);
  static std::vector<std::string> builtin_names();
  // key = value text: <metric>.mean, .std, .mean_tolerance, .std_tolerance,
  // .informational (0/1). Unlisted metrics are not compared.
  static TargetSet parse(std::string_view name, std::string_view text);
};

struct ReportRow {
  std::string name;  // e.g. "acg_db.mean"
  double target;
  double measured;
  double tolerance;  // absolute
  bool available;
  bool informational;
  bool pass;
};

struct ReportStamp {
  std::optional<std::uint64_t> seed;
  std::string scheme;
  std::size_t n_freq = 0;
  std::size_t decimation = 1;
  std::size_t n_realizations = 0;
  std::string source;
};

struct ValidationReport {
  std::string target_name;
  ReportStamp stamp;
  std::vector<ReportRow> rows;

  // True iff every non-informational row passes.
  bool pass() const;
  std::string text() const;
  std::string key_values() const;
};

ValidationReport validate_summary(const MetricsSummary& summary, const TargetSet& targets,
                                  ReportStamp stamp);

}  // namespace plcsynth
