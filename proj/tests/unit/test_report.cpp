#include <gtest/gtest.h>

#include "sicg/errors.hpp"
#include "sicg/report.hpp"

using namespace sicg;

namespace {

const ReportCheck* find_check(const OrbitReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST(Report, Orbit5aPasses) {
  ReportOptions o;
  auto r = report_orbit("5a", o);
  EXPECT_TRUE(r.pass()) << r.text();
  EXPECT_EQ(r.s_tilde, 3u);
  EXPECT_EQ(r.centralizer, 24u);
  EXPECT_EQ(r.quotient, "Z8");
  EXPECT_EQ(r.discovered, "Z8");
  ASSERT_TRUE(r.structure_case.has_value());
  ASSERT_NE(find_check(r, "p_realized"), nullptr);
}

TEST(Report, QubitQuotient) {
  ReportOptions o;
  auto r = report_orbit("2a", o);
  EXPECT_TRUE(r.pass()) << r.text();
  EXPECT_FALSE(r.s_bar_abelian);
  EXPECT_EQ(r.normalizer / r.s_bar, 2u);
  EXPECT_EQ(r.quotient, "undefined");
}

TEST(Report, RecordTypes) {
  auto records = load_orbit_records(data_dir() + "/orbits/records.txt");
  EXPECT_EQ(record_type(*find_orbit(records, "12b")), OrbitType::a);
  EXPECT_EQ(record_type(*find_orbit(records, "12a")), OrbitType::z);
  EXPECT_EQ(record_type(*find_orbit(records, "48g")), OrbitType::a);
  EXPECT_EQ(record_type(*find_orbit(records, "4a")), OrbitType::z);
}

TEST(Report, OutputIsStable) {
  ReportOptions o;
  o.discover = false;
  auto a = report_orbit("4a", o), b = report_orbit("4a", o);
  EXPECT_EQ(a.text(), b.text());
  EXPECT_EQ(a.key_values(), b.key_values());
}

TEST(Report, WrongFiducialFailsTheDiff) {
  // A 7b fiducial reported as 7a disagrees with the 7a box on |S~|.
  ReportOptions o;
  o.discover = false;
  o.fiducial_path = data_dir() + "/fiducials/7b.fid";
  auto r = report_orbit("7a", o);
  EXPECT_FALSE(r.pass());
  EXPECT_FALSE(find_check(r, "s_tilde")->pass);
}

TEST(Report, UnknownLabel) {
  ReportOptions o;
  EXPECT_THROW(report_orbit("99z", o), FormatError);
}

TEST(Report, Labels) {
  auto l = report_labels(4, 8);
  EXPECT_EQ(l, (std::vector<std::string>{"4a", "5a", "6a", "7a", "7b", "8a", "8b"}));
  EXPECT_EQ(report_labels(9, 10), (std::vector<std::string>{"9a", "9b", "10a"}));
  EXPECT_EQ(report_labels(2, 3), (std::vector<std::string>{"2a", "3b", "3c"}));
}
