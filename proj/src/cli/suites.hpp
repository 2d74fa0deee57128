#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace krein::cli {

// A check passes when residual < tolerance.
struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;  // why the residual is infinite, or what it measures
  bool passed() const { return residual < tolerance; }
};

using Tolerances = std::map<std::string, double>;

const Tolerances& default_tolerances();

struct SuiteOptions {
  std::uint64_t seed = 0;
  Tolerances overrides;
  std::optional<PointsInput> points;
  std::optional<CurveInput> curve;
  std::optional<DalembertInput> dalembert;
};

std::vector<Check> testbed_suite(const SuiteOptions& o);
std::vector<Check> points_suite(const SuiteOptions& o);
std::vector<Check> curve_suite(const SuiteOptions& o);
std::vector<Check> dalembert_suite(const SuiteOptions& o);

// shape of the seeded testbed used by the testbed suite
struct TestbedShape {
  int m = 0, n = 0;
};
TestbedShape testbed_shape(std::uint64_t seed);

// default models of the suites
points::PointConfig two_center_config(double separation = 1.0);
dalembert::Separable default_line_data();

}  // namespace krein::cli
