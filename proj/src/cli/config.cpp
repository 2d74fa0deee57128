#include "config.hpp"

#include <fstream>
#include <sstream>

namespace krein::cli {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<int>();
}

Complex complex_value(const Json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(what + " must be a number or a [re, im] pair");
}

template <std::size_t N>
std::array<double, N> vec(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != N) fail(what + " must be an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i], what);
  return out;
}

std::vector<Vec3> point_list(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array of [x, y, z]");
  std::vector<Vec3> out;
  for (const Json& p : j) out.push_back(vec<3>(p, what));
  return out;
}

ThetaMatrix parse_theta(const Json& j, Eigen::Index n) {
  if (j.is_number()) return ThetaMatrix::scalar(n, j.get<double>());
  if (j.is_object() && j.contains("scalar")) return ThetaMatrix::scalar(n, number(j.at("scalar"), "theta.scalar"));
  if (j.is_object() && j.contains("matrix")) {
    const Json& m = j.at("matrix");
    // flat row-major list of [re, im] entries, or a list of rows
    std::vector<Complex> entries;
    if (m.is_array() && !m.empty() && m[0].is_array() && !m[0].empty() && m[0][0].is_array()) {
      for (const Json& row : m)
        for (const Json& e : row) entries.push_back(complex_value(e, "theta.matrix entry"));
    } else if (m.is_array()) {
      for (const Json& e : m) entries.push_back(complex_value(e, "theta.matrix entry"));
    }
    if (static_cast<Eigen::Index>(entries.size()) != n * n)
      fail("theta.matrix needs " + std::to_string(n * n) + " entries");
    MatrixXc t(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) t(r, c) = entries[r * n + c];
    return ThetaMatrix(t);
  }
  fail("theta must be {\"scalar\": a} or {\"matrix\": [...]}");
}

void read_interval(const Json& j, double& a, double& b, int& resolution) {
  if (j.contains("interval")) {
    const auto iv = vec<2>(j.at("interval"), "interval");
    a = iv[0];
    b = iv[1];
  }
  if (j.contains("resolution")) resolution = integer(j.at("resolution"), "resolution");
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    fail("invalid JSON in '" + path + "': " + e.what());
  }
}

PointsInput parse_points(const Json& j) {
  const std::vector<Vec3> centers = point_list(need(j, "centers"), "centers");
  ThetaMatrix theta = parse_theta(need(j, "theta"), static_cast<Eigen::Index>(centers.size()));
  PointsInput in(points::PointConfig(centers, theta));
  read_interval(j, in.a, in.b, in.resolution);
  if (j.contains("z")) in.z = complex_value(j.at("z"), "z");
  if (j.contains("kernel")) {
    const Json& k = j.at("kernel");
    if (k.contains("from")) in.kernel.from = vec<3>(k.at("from"), "kernel.from");
    if (k.contains("to")) in.kernel.to = vec<3>(k.at("to"), "kernel.to");
    if (k.contains("source")) in.kernel.source = vec<3>(k.at("source"), "kernel.source");
    if (k.contains("samples")) in.kernel.samples = integer(k.at("samples"), "kernel.samples");
    if (in.kernel.samples < 2) fail("kernel.samples must be at least 2");
  }
  return in;
}

curve::CurveModel CurveInput::with_size(int size) const {
  switch (curve.kind()) {
    case curve::CurveKind::circle:
      return curve::CurveModel::circle(radius, size);
    case curve::CurveKind::segment:
      return curve::CurveModel::segment(length, size);
    case curve::CurveKind::samples:
      return curve::CurveModel::samples(source_points, size);
    case curve::CurveKind::helix:
      break;
  }
  fail("curve kind cannot be rebuilt");
}

CurveInput parse_curve(const Json& j) {
  const Json& kind = need(j, "kind");
  if (!kind.is_string()) fail("kind must be a string");
  const std::string k = kind.get<std::string>();
  CurveInput in(curve::CurveModel::circle(1.0, 64));
  if (j.contains("N")) in.n = integer(j.at("N"), "N");
  if (in.n < 8) fail("N must be at least 8");
  if (k == "circle") {
    in.radius = number(need(j, "radius"), "radius");
    in.curve = curve::CurveModel::circle(in.radius, in.n);
  } else if (k == "segment") {
    in.length = number(need(j, "length"), "length");
    in.curve = curve::CurveModel::segment(in.length, in.n);
  } else if (k == "samples") {
    in.source_points = point_list(need(j, "points"), "points");
    in.curve = curve::CurveModel::samples(in.source_points, in.n);
  } else {
    fail("kind must be \"circle\", \"segment\" or \"samples\"");
  }
  if (j.contains("epsilon")) in.epsilon = number(j.at("epsilon"), "epsilon");
  if (j.contains("beta")) in.beta = number(j.at("beta"), "beta");
  read_interval(j, in.a, in.b, in.resolution);
  return in;
}

dalembert::MultiplierGrid DalembertInput::resolved_grid() const {
  if (grid) return *grid;
  return dalembert::MultiplierGrid::for_width(data.phi.width, data.phi.center);
}

DalembertInput parse_dalembert(const Json& j) {
  DalembertInput in;
  const double theta = number(need(j, "theta"), "theta");
  const Vec3 v = j.contains("v") ? vec<3>(j.at("v"), "v") : Vec3{0.0, 0.0, 0.0};
  const Vec4 y = j.contains("y") ? vec<4>(j.at("y"), "y") : Vec4{0.0, 0.0, 0.0, 0.0};
  in.line = dalembert::LineConfig(y, v, theta);
  const Json& phi = need(j, "phi");
  in.data.phi.center = number(need(phi, "center"), "phi.center");
  in.data.phi.width = number(need(phi, "width"), "phi.width");
  const Json& varphi = need(j, "varphi");
  in.data.varphi.width = number(need(varphi, "width"), "varphi.width");
  in.data.varphi.center = Vec3{0.5, 0.2, -0.3};
  if (varphi.contains("center")) in.data.varphi.center = vec<3>(varphi.at("center"), "varphi.center");
  if (!(in.data.phi.width > 0.0) || !(in.data.varphi.width > 0.0)) fail("Gaussian widths must be positive");
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    const int n = integer(need(g, "n"), "grid.n");
    const double dt = number(need(g, "spacing"), "grid.spacing");
    const double c = g.contains("center") ? number(g.at("center"), "grid.center") : in.data.phi.center;
    in.grid = dalembert::MultiplierGrid(n, dt, c);
  }
  if (j.contains("z")) in.z = complex_value(j.at("z"), "z");
  if (j.contains("x")) in.x = vec<3>(j.at("x"), "x");
  return in;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> g.a >> c1 >> g.b >> c2 >> g.n) || c1 != ':' || c2 != ':' || !ss.eof())
    fail("--grid expects a:b:n, got '" + text + "'");
  if (!(g.a > 0.0) || !(g.b > g.a) || g.n < 2) fail("--grid needs 0 < a < b and n >= 2");
  return g;
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

}  // namespace krein::cli
