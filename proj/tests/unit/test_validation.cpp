#include <gtest/gtest.h>

#include <algorithm>

#include "plcsynth/error.hpp"
#include "plcsynth/validation.hpp"

using namespace plcsynth;

namespace {

const MetricTarget& row(const TargetSet& t, MetricId id) {
  const auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const auto& r) { return r.metric == id; });
  if (it == t.rows.end()) throw std::runtime_error("row missing");
  return *it;
}

MetricStatistic stat(double mean, double std) { return {mean, std, true, true}; }

MetricsSummary summary_matching(const TargetSet& t) {
  MetricsSummary s;
  s.n_realizations = 100;
  for (const auto& r : t.rows) {
    const MetricStatistic v = stat(r.mean, r.std);
    switch (r.metric) {
      case MetricId::acg_db: s.acg_db = v; break;
      case MetricId::rms_ds_us: s.rms_ds_us = v; break;
      case MetricId::cb_khz: s.cb_khz = v; break;
      case MetricId::kappa_db: s.kappa_db = v; break;
      case MetricId::capacity_gbps: s.capacity_gbps = v; break;
    }
  }
  return s;
}

const ReportRow& report_row(const ValidationReport& r, const std::string& name) {
  const auto it = std::find_if(r.rows.begin(), r.rows.end(), [&](const auto& x) { return x.name == name; });
  if (it == r.rows.end()) throw std::runtime_error("report row missing: " + name);
  return *it;
}

}  // namespace

// Published table values.
TEST(Targets, SyntheticTwoByThree) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  EXPECT_EQ(row(t, MetricId::acg_db).mean, -43.07);
  EXPECT_EQ(row(t, MetricId::acg_db).std, 12.53);
  EXPECT_EQ(row(t, MetricId::rms_ds_us).mean, 0.335);
  EXPECT_EQ(row(t, MetricId::rms_ds_us).std, 0.052);
  EXPECT_EQ(row(t, MetricId::cb_khz).mean, 217.71);
  EXPECT_EQ(row(t, MetricId::cb_khz).std, 53.76);
  EXPECT_EQ(row(t, MetricId::kappa_db).mean, 14.70);
  EXPECT_EQ(row(t, MetricId::kappa_db).std, 6.64);
  EXPECT_EQ(row(t, MetricId::capacity_gbps).mean, 1.49);
  EXPECT_TRUE(row(t, MetricId::capacity_gbps).informational);
}

TEST(Targets, ReducedSchemes) {
  const TargetSet siso = TargetSet::builtin("table4-siso");
  EXPECT_EQ(row(siso, MetricId::acg_db).mean, -40.53);
  EXPECT_EQ(row(siso, MetricId::rms_ds_us).mean, 0.332);
  EXPECT_EQ(row(siso, MetricId::cb_khz).mean, 210.87);
  EXPECT_THROW(row(siso, MetricId::kappa_db), std::runtime_error);
  const TargetSet mimo = TargetSet::builtin("table4-2x2");
  EXPECT_EQ(row(mimo, MetricId::kappa_db).mean, 18.74);
  EXPECT_EQ(row(mimo, MetricId::kappa_db).mean_tolerance, 2.0);
  EXPECT_EQ(row(mimo, MetricId::cb_khz).mean, 219.54);
  EXPECT_EQ(row(TargetSet::builtin("table3-experimental"), MetricId::cb_khz).std, 324.30);
  EXPECT_EQ(row(TargetSet::builtin("table3-not-fully-synthetic"), MetricId::rms_ds_us).mean, 2.702);
}

TEST(Targets, Tolerances) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  EXPECT_EQ(row(t, MetricId::acg_db).mean_tolerance, 1.5);
  EXPECT_EQ(row(t, MetricId::rms_ds_us).mean_tolerance, 0.03);
  EXPECT_EQ(row(t, MetricId::cb_khz).mean_tolerance, 62.5);
  EXPECT_EQ(row(t, MetricId::kappa_db).mean_tolerance, 1.5);
}

TEST(Targets, EveryBuiltinResolves) {
  for (const auto& name : TargetSet::builtin_names()) {
    const TargetSet t = TargetSet::builtin(name);
    EXPECT_EQ(t.name, name);
    EXPECT_FALSE(t.rows.empty());
  }
  EXPECT_THROW(TargetSet::builtin("table9"), InvalidInput);
}

TEST(Targets, CustomFile) {
  const TargetSet t = TargetSet::parse("mine",
                                       "# custom\nacg_db.mean = -40\nacg_db.std = 10\n"
                                       "acg_db.mean_tolerance = 2\nacg_db.std_tolerance = 0.25\n"
                                       "capacity_gbps.mean = 1\ncapacity_gbps.std = 0.5\n"
                                       "capacity_gbps.mean_tolerance = 0.1\ncapacity_gbps.informational = 1\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].metric, MetricId::acg_db);
  EXPECT_EQ(t.rows[0].mean_tolerance, 2.0);
  EXPECT_EQ(t.rows[0].std_tolerance_rel, 0.25);
  EXPECT_FALSE(t.rows[0].informational);
  EXPECT_TRUE(t.rows[1].informational);
  EXPECT_EQ(t.rows[1].std_tolerance_rel, 0.5);

  EXPECT_THROW(TargetSet::parse("x", "acg_db.mean = 1\nacg_db.std = 1\n"), ParseError);
  EXPECT_THROW(TargetSet::parse("x", "# nothing\n"), ParseError);
  EXPECT_THROW(TargetSet::parse("x", "acg_db.mean = 1\nacg_db.std = 1\nacg_db.mean_tolerance = 1\nbogus = 2\n"),
               ParseError);
  EXPECT_THROW(TargetSet::parse("x", "acg_db.mean = 1\nacg_db.std = 1\nacg_db.mean_tolerance = -1\n"),
               ParseError);
}

TEST(Report, ExactMatchPasses) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  const ValidationReport r = validate_summary(summary_matching(t), t, {});
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.rows.size(), 2 * t.rows.size());
}

TEST(Report, ToleranceEdges) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  MetricsSummary s = summary_matching(t);
  s.acg_db.mean = -43.07 + 1.49;
  EXPECT_TRUE(validate_summary(s, t, {}).pass());
  s.acg_db.mean = -43.07 - 1.51;
  const ValidationReport r = validate_summary(s, t, {});
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(report_row(r, "acg_db.mean").pass);
  EXPECT_TRUE(report_row(r, "acg_db.std").pass);

  s = summary_matching(t);
  s.rms_ds_us.std = 0.052 * 1.49;
  EXPECT_TRUE(validate_summary(s, t, {}).pass());
  s.rms_ds_us.std = 0.052 * 1.51;
  EXPECT_FALSE(validate_summary(s, t, {}).pass());
  EXPECT_NEAR(report_row(validate_summary(s, t, {}), "rms_ds_us.std").tolerance, 0.026, 1e-15);
}

TEST(Report, InformationalRowsNeverFail) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  MetricsSummary s = summary_matching(t);
  s.capacity_gbps.mean = 100.0;
  const ValidationReport r = validate_summary(s, t, {});
  EXPECT_FALSE(report_row(r, "capacity_gbps.mean").pass);
  EXPECT_TRUE(r.pass());
  s.capacity_gbps.available = false;
  EXPECT_TRUE(validate_summary(s, t, {}).pass());
}

TEST(Report, MissingOrUndefinedStatisticsFail) {
  const TargetSet t = TargetSet::builtin("table3-synthetic");
  MetricsSummary s = summary_matching(t);
  s.kappa_db.available = false;
  EXPECT_FALSE(validate_summary(s, t, {}).pass());
  s = summary_matching(t);
  s.acg_db.std_defined = false;
  const ValidationReport r = validate_summary(s, t, {});
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(report_row(r, "acg_db.std").available);
}

TEST(Report, TextAndKeyValues) {
  const TargetSet t = TargetSet::builtin("table4-siso");
  ReportStamp stamp{7u, "siso", 1589, 1, 353, "generated"};
  MetricsSummary s = summary_matching(t);
  s.cb_khz.mean = 1000.0;
  const ValidationReport r = validate_summary(s, t, stamp);
  const std::string text = r.text();
  EXPECT_NE(text.find("table4-siso"), std::string::npos);
  EXPECT_NE(text.find("seed 7"), std::string::npos);
  EXPECT_NE(text.find("FAIL"), std::string::npos);
  EXPECT_NE(text.find("overall FAIL"), std::string::npos);
  const std::string kv = r.key_values();
  EXPECT_NE(kv.find("cb_khz.mean.pass=0\n"), std::string::npos);
  EXPECT_NE(kv.find("acg_db.mean.pass=1\n"), std::string::npos);
  EXPECT_NE(kv.find("n_freq=1589\n"), std::string::npos);
  EXPECT_NE(kv.find("seed=7\n"), std::string::npos);
  EXPECT_EQ(kv.substr(kv.size() - 7), "pass=0\n");
}
