#include "plcsynth/validation.hpp"

#include <cmath>
#include <array>
#include <cstdio>
#include <optional>
#include <sstream>

#include "plcsynth/error.hpp"
#include "key_value.hpp"

namespace plcsynth {

namespace {

constexpr MetricId kAllMetrics[] = {MetricId::acg_db, MetricId::rms_ds_us, MetricId::cb_khz,
                                    MetricId::kappa_db, MetricId::capacity_gbps};

// Mean tolerances: ACG 1.5 dB, RMS-DS 0.03 us, CB one 62.5 kHz bin, kappa 1.5 dB.
constexpr double kStdTolerance = 0.5;

struct Column {
  double acg[2];
  double ds[2];
  double cb[2];
  std::optional<std::array<double, 2>> kappa;
  double cap[2];
  double kappa_tol = 1.5;
};

TargetSet from_column(std::string name, const Column& c) {
  TargetSet t{std::move(name), {}};
  t.rows.push_back({MetricId::acg_db, c.acg[0], c.acg[1], 1.5, kStdTolerance});
  t.rows.push_back({MetricId::rms_ds_us, c.ds[0], c.ds[1], 0.03, kStdTolerance});
  t.rows.push_back({MetricId::cb_khz, c.cb[0], c.cb[1], 62.5, kStdTolerance});
  if (c.kappa) {
    t.rows.push_back({MetricId::kappa_db, (*c.kappa)[0], (*c.kappa)[1], c.kappa_tol, kStdTolerance});
  }
  t.rows.push_back({MetricId::capacity_gbps, c.cap[0], c.cap[1], 0.0, kStdTolerance, true});
  return t;
}

const MetricStatistic& statistic(const MetricsSummary& s, MetricId id) {
  switch (id) {
    case MetricId::acg_db: return s.acg_db;
    case MetricId::rms_ds_us: return s.rms_ds_us;
    case MetricId::cb_khz: return s.cb_khz;
    case MetricId::kappa_db: return s.kappa_db;
    case MetricId::capacity_gbps: return s.capacity_gbps;
  }
  throw InvalidInput("unknown metric");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::acg_db: return "acg_db";
    case MetricId::rms_ds_us: return "rms_ds_us";
    case MetricId::cb_khz: return "cb_khz";
    case MetricId::kappa_db: return "kappa_db";
    case MetricId::capacity_gbps: return "capacity_gbps";
  }
  return "?";
}

std::vector<std::string> TargetSet::builtin_names() {
  return {"table3-synthetic",   "table3-experimental", "table3-not-fully-synthetic",
          "table4-siso",        "table4-2x2",          "table4-siso-experimental",
          "table4-2x2-experimental"};
}

TargetSet TargetSet::builtin(std::string_view name) {
  // 2x3 in-home database and its synthetic counterparts.
  if (name == "table3-experimental") {
    return from_column(std::string(name), {{-42.30, 9.93}, {0.350, 0.226}, {293.22, 324.30},
                                           std::array{14.26, 7.25}, {1.53, 0.74}});
  }
  if (name == "table3-synthetic") {
    return from_column(std::string(name), {{-43.07, 12.53}, {0.335, 0.052}, {217.71, 53.76},
                                           std::array{14.70, 6.64}, {1.49, 0.68}});
  }
  if (name == "table3-not-fully-synthetic") {
    return from_column(std::string(name), {{-41.08, 11.07}, {2.702, 0.415}, {0.0, 0.0},
                                           std::array{10.62, 5.16}, {1.61, 0.70}});
  }
  if (name == "table4-siso-experimental") {
    return from_column(std::string(name), {{-40.12, 12.79}, {0.353, 0.266}, {342.50, 467.28},
                                           std::nullopt, {0.76, 0.43}});
  }
  if (name == "table4-siso") {
    return from_column(std::string(name), {{-40.53, 14.99}, {0.332, 0.052}, {210.87, 51.01},
                                           std::nullopt, {0.76, 0.40}});
  }
  if (name == "table4-2x2-experimental") {
    return from_column(std::string(name), {{-40.87, 12.00}, {0.357, 0.249}, {316.65, 392.65},
                                           std::array{16.65, 8.81}, {1.35, 0.76}, 2.0});
  }
  if (name == "table4-2x2") {
    return from_column(std::string(name), {{-43.12, 14.41}, {0.330, 0.055}, {219.54, 56.20},
                                           std::array{18.74, 9.98}, {1.31, 0.66}, 2.0});
  }
  throw InvalidInput("unknown target set '" + std::string(name) + "'");
}

TargetSet TargetSet::parse(std::string_view name, std::string_view text) {
  detail::Entries e(text);
  TargetSet t{std::string(name), {}};
  for (MetricId id : kAllMetrics) {
    const std::string key(to_string(id));
    if (!e.has_prefix(key + ".")) continue;
    MetricTarget row{id, e.number(key + ".mean"), e.number(key + ".std"), 0.0, kStdTolerance};
    row.mean_tolerance = e.number(key + ".mean_tolerance");
    e.number_if(key + ".std_tolerance", row.std_tolerance_rel);
    double info = 0.0;
    e.number_if(key + ".informational", info);
    row.informational = info != 0.0;
    if (row.mean_tolerance < 0.0 || row.std_tolerance_rel < 0.0) {
      throw ParseError("negative tolerance for " + key);
    }
    t.rows.push_back(row);
  }
  e.finish();
  if (t.rows.empty()) throw ParseError("target file lists no metrics");
  return t;
}

bool ValidationReport::pass() const {
  for (const ReportRow& r : rows) {
    if (!r.informational && !r.pass) return false;
  }
  return true;
}

ValidationReport validate_summary(const MetricsSummary& summary, const TargetSet& targets,
                                  ReportStamp stamp) {
  ValidationReport report{targets.name, std::move(stamp), {}};
  for (const MetricTarget& t : targets.rows) {
    const MetricStatistic& s = statistic(summary, t.metric);
    const std::string key(to_string(t.metric));
    ReportRow mean{key + ".mean", t.mean, s.mean, t.mean_tolerance, s.available, t.informational, false};
    mean.pass = s.available && std::abs(s.mean - t.mean) <= t.mean_tolerance;
    const bool std_ok = s.available && s.std_defined;
    ReportRow sd{key + ".std", t.std, s.std, t.std_tolerance_rel * t.std, std_ok, t.informational, false};
    sd.pass = std_ok && std::abs(s.std - t.std) <= sd.tolerance;
    report.rows.push_back(mean);
    report.rows.push_back(sd);
  }
  return report;
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  out << "validation against " << target_name << "\n";
  out << "  source " << stamp.source << ", scheme " << stamp.scheme << ", N_f " << stamp.n_freq
      << ", decimation " << stamp.decimation << ", realizations " << stamp.n_realizations;
  if (stamp.seed) out << ", seed " << *stamp.seed;
  out << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %-22s %12s %12s %12s  %s\n", "row", "target", "measured",
                "tolerance", "result");
  out << line;
  for (const ReportRow& r : rows) {
    const char* verdict = !r.available ? "n/a" : r.pass ? "pass" : "FAIL";
    std::snprintf(line, sizeof line, "  %-22s %12s %12s %12s  %s%s\n", r.name.c_str(),
                  num(r.target).c_str(), r.available ? num(r.measured).c_str() : "-",
                  num(r.tolerance).c_str(), verdict, r.informational ? " (informational)" : "");
    out << line;
  }
  out << "\noverall " << (pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string ValidationReport::key_values() const {
  std::ostringstream out;
  out << "target=" << target_name << "\n";
  out << "source=" << stamp.source << "\n";
  out << "scheme=" << stamp.scheme << "\n";
  out << "n_freq=" << stamp.n_freq << "\n";
  out << "decimation=" << stamp.decimation << "\n";
  out << "n_realizations=" << stamp.n_realizations << "\n";
  if (stamp.seed) out << "seed=" << *stamp.seed << "\n";
  for (const ReportRow& r : rows) {
    out << r.name << ".target=" << num(r.target) << "\n";
    out << r.name << ".measured=" << (r.available ? num(r.measured) : "nan") << "\n";
    out << r.name << ".tolerance=" << num(r.tolerance) << "\n";
    out << r.name << ".informational=" << (r.informational ? 1 : 0) << "\n";
    out << r.name << ".pass=" << (r.pass ? 1 : 0) << "\n";
  }
  out << "pass=" << (pass() ? 1 : 0) << "\n";
  return out.str();
}

}  // namespace plcsynth
