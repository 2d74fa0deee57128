#include "krein/eigen_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "krein/errors.hpp"
#include "krein/linalg.hpp"
#include "krein/parallel.hpp"

namespace krein {

namespace {

struct Eig {
  Eigen::VectorXd vals;
  MatrixXc vecs;
  double scale = 1.0;
};

Eig eig_at(const HermitianFamily& family, double lambda, bool vectors) {
  const MatrixXc m = family(lambda);
  const MatrixXc h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  Eig e;
  e.vals = es.eigenvalues();
  if (vectors) e.vecs = es.eigenvectors();
  e.scale = std::max(max_abs(h), std::numeric_limits<double>::min());
  return e;
}

double bisect(const HermitianFamily& family, int k, double lo, double hi, double mu_lo) {
  const bool lo_negative = mu_lo < 0.0;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double mid = 0.5 * (lo + hi);
    const double mu = eig_at(family, mid, false).vals(k);
    if (mu == 0.0) return mid;
    if ((mu < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> log_grid(double a, double b, int n) {
  if (!(a > 0.0) || !(b > a)) throw IntervalError("log grid needs 0 < a < b");
  if (n < 2) throw ContractViolation("grid needs at least two points");
  std::vector<double> g(n);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * i / (n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

TrackResult track_roots(const HermitianFamily& family, double a, double b, int resolution,
                        const TrackOptions& options) {
  if (!(a > 0.0)) throw IntervalError("search interval must lie in (0, inf)");
  if (!(b > a)) throw IntervalError("search interval must satisfy a < b");
  std::vector<double> grid = log_grid(a, b, resolution);
  TrackResult result;

  auto evaluate = [&](const std::vector<double>& pts) {
    std::vector<Eig> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { out[i] = eig_at(family, pts[i], true); });
    return out;
  };
  std::vector<Eig> eigs = evaluate(grid);
  const int dim = static_cast<int>(eigs.front().vals.size());
  const int curves = options.max_curves >= 0 ? std::min(options.max_curves, dim) : dim;

  // monotonicity, with one round of local re-gridding where it fails
  auto decreasing = [&](const Eig& x, const Eig& y) {
    for (int k = 0; k < curves; ++k)
      if (y.vals(k) < x.vals(k) - 1e-13 * std::max(x.scale, y.scale)) return k;
    return -1;
  };
  std::vector<double> g2;
  std::vector<Eig> e2;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    g2.push_back(grid[i]);
    e2.push_back(eigs[i]);
    const int k = decreasing(eigs[i], eigs[i + 1]);
    if (k < 0) continue;
    std::vector<double> sub = log_grid(grid[i], grid[i + 1], options.refine_factor + 1);
    sub = std::vector<double>(sub.begin() + 1, sub.end() - 1);
    std::vector<Eig> se = evaluate(sub);
    std::ostringstream os;
    os << "eigenvalue curve " << k << " decreases on [" << grid[i] << ", " << grid[i + 1] << "]; re-gridded";
    result.warnings.push_back(os.str());
    g2.insert(g2.end(), sub.begin(), sub.end());
    e2.insert(e2.end(), se.begin(), se.end());
  }
  g2.push_back(grid.back());
  e2.push_back(eigs.back());
  grid = std::move(g2);
  eigs = std::move(e2);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const int k = decreasing(eigs[i], eigs[i + 1]);
    if (k >= 0) {
      result.monotone = false;
      std::ostringstream os;
      os << "eigenvalue curve " << k << " still decreases on [" << grid[i] << ", " << grid[i + 1]
         << "] after re-gridding";
      result.warnings.push_back(os.str());
    }
  }

  // ordering ambiguity: eigenvector k must stay inside the matching cluster
  int ambiguous = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const Eig& x = eigs[i];
    const Eig& y = eigs[i + 1];
    for (int k = 0; k < curves; ++k) {
      double proj2 = 0.0;
      for (int l = 0; l < dim; ++l)
        if (l == k || std::abs(y.vals(l) - y.vals(k)) <= 1e-9 * y.scale)
          proj2 += std::norm(y.vecs.col(l).dot(x.vecs.col(k)));
      if (proj2 < 0.25) {
        if (ambiguous < 5) {
          std::ostringstream os;
          os << "resolution: ordering of eigenvalue curve " << k << " ambiguous on [" << grid[i] << ", "
             << grid[i + 1] << "]";
          result.warnings.push_back(os.str());
        }
        ++ambiguous;
      }
    }
  }
  if (ambiguous > 5) result.warnings.push_back("resolution: " + std::to_string(ambiguous - 5) + " more ambiguous intervals");

  for (std::size_t i = 0; i < grid.size(); ++i) result.samples.push_back({grid[i], eigs[i].vals});

  struct Candidate {
    double lambda;
    int curve;
  };
  std::vector<Candidate> cands;
  for (int k = 0; k < curves; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double mu = eigs[i].vals(k);
      if (mu == 0.0) {
        cands.push_back({grid[i], k});
        continue;
      }
      if (i + 1 < grid.size()) {
        const double nu = eigs[i + 1].vals(k);
        if ((mu < 0.0) != (nu < 0.0) && nu != 0.0) cands.push_back({bisect(family, k, grid[i], grid[i + 1], mu), k});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.lambda < y.lambda; });

  std::size_t i = 0;
  while (i < cands.size()) {
    std::size_t j = i + 1;
    while (j < cands.size() && cands[j].lambda - cands[i].lambda <= options.cluster_tol * cands[i].lambda) ++j;
    std::set<int> ks;
    double sum = 0.0;
    for (std::size_t q = i; q < j; ++q) {
      ks.insert(cands[q].curve);
      sum += cands[q].lambda;
    }
    TrackedRoot root;
    root.lambda = sum / static_cast<double>(j - i);
    const Eig e = eig_at(family, root.lambda, true);
    int mult = static_cast<int>(ks.size());
    if (options.max_curves >= 0) {
      int zeros = 0;
      for (int l = 0; l < dim; ++l)
        if (std::abs(e.vals(l)) <= 1e-9 * e.scale) ++zeros;
      mult = std::max(mult, zeros);
    }
    std::vector<int> order(dim);
    for (int l = 0; l < dim; ++l) order[l] = l;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return std::abs(e.vals(x)) < std::abs(e.vals(y)); });
    root.multiplicity = mult;
    root.kernel.resize(dim, mult);
    for (int c = 0; c < mult; ++c) {
      root.kernel.col(c) = e.vecs.col(order[c]);
      root.residual = std::max(root.residual, std::abs(e.vals(order[c])));
    }
    result.roots.push_back(std::move(root));
    i = j;
  }
  return result;
}

}  // namespace krein
