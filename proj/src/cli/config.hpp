#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "krein/curve.hpp"
#include "krein/dalembert.hpp"
#include "krein/points.hpp"

// JSON model configurations. Malformed input throws ConfigError; model
// invariants (distinct centers, Hermitian Theta, ...) surface as the library's
// own errors.

namespace krein::cli {

using Json = nlohmann::json;

Json load_json(const std::string& path);

struct KernelLine {
  Vec3 from{-2.0, 0.0, 0.0};
  Vec3 to{3.0, 0.0, 0.0};
  Vec3 source{0.0, 0.5, 0.0};
  int samples = 101;
};

struct PointsInput {
  explicit PointsInput(points::PointConfig c) : config(std::move(c)) {}
  points::PointConfig config;
  double a = 0.01, b = 100.0;
  int resolution = 64;
  Complex z{1.0, 0.0};
  KernelLine kernel;
};

struct CurveInput {
  explicit CurveInput(curve::CurveModel c) : curve(std::move(c)) {}
  curve::CurveModel curve;
  // N and the points used to rebuild the curve at another resolution
  int n = 64;
  std::vector<Vec3> source_points;
  double radius = 1.0, length = 1.0;
  double epsilon = -1.0;  // negative: default L/20
  double beta = -1.0;
  double a = 0.01, b = 1e6;
  int resolution = 120;
  curve::CurveModel with_size(int n) const;
};

struct DalembertInput {
  dalembert::LineConfig line;
  dalembert::Separable data;
  std::optional<dalembert::MultiplierGrid> grid;
  Complex z{1.0, 2.0};
  // spatial point of the resolvent samples
  Vec3 x{0.7, 0.0, 0.0};
  dalembert::MultiplierGrid resolved_grid() const;
};

PointsInput parse_points(const Json& j);
CurveInput parse_curve(const Json& j);
DalembertInput parse_dalembert(const Json& j);

// a:b:n
struct GridSpec {
  double a = 0.0, b = 0.0;
  int n = 0;
};
GridSpec parse_grid(const std::string& text);

Json complex_json(Complex c);

}  // namespace krein::cli
