#include "ctrecov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "ctrecov/rank.hpp"

namespace ctrecov {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DiskMask build_disk_mask(int n_side) {
  if (n_side < 2) throw InvalidArgument("n_side must be at least 2");
  DiskMask mask;
  mask.n_side = n_side;
  mask.inside.assign(static_cast<std::size_t>(n_side) * n_side, 0);
  mask.grid_to_vec.assign(static_cast<std::size_t>(n_side) * n_side, -1);
  const double r2 = 0.25 * n_side * n_side;
  for (int r = 0; r < n_side; ++r) {
    for (int c = 0; c < n_side; ++c) {
      const double x = c + 0.5 - 0.5 * n_side;
      const double y = 0.5 * n_side - (r + 0.5);
      if (x * x + y * y < r2) {
        const std::size_t g = static_cast<std::size_t>(r) * n_side + c;
        mask.inside[g] = 1;
        mask.grid_to_vec[g] = mask.n;
        mask.vec_to_grid.push_back(static_cast<int>(g));
        ++mask.n;
      }
    }
  }
  return mask;
}

void write_mask_json(const DiskMask& mask, const std::string& path) {
  nlohmann::json j;
  j["n_side"] = mask.n_side;
  j["inside_indices"] = mask.vec_to_grid;
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

DiskMask read_mask_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  const int n_side = j.at("n_side").get<int>();
  DiskMask mask = build_disk_mask(n_side);
  const auto idx = j.at("inside_indices").get<std::vector<int>>();
  if (idx != mask.vec_to_grid)
    throw InvalidArgument("mask file disagrees with disk mask for n_side " +
                          std::to_string(n_side));
  return mask;
}

FanBeamGeometry FanBeamGeometry::standard(int n_side, int n_views,
                                          double start_angle_deg) {
  if (n_side < 2) throw InvalidArgument("n_side must be at least 2");
  if (n_views < 1) throw InvalidArgument("n_views must be positive");
  FanBeamGeometry g;
  g.n_side = n_side;
  g.n_views = n_views;
  g.source_center_distance = 2.0 * n_side;
  g.detector_bins = 2 * n_side;
  g.start_angle_deg = start_angle_deg;
  return g;
}

double FanBeamGeometry::view_angle(int t) const {
  return (start_angle_deg * kPi / 180.0) + 2.0 * kPi * t / n_views;
}

std::vector<RayHit> trace_ray(int n_side, double sx, double sy, double dx,
                              double dy) {
  std::vector<RayHit> hits;
  const double lo = -0.5 * n_side;
  const double hi = 0.5 * n_side;

  // clip the ray to the grid box
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  const double pos[2] = {sx, sy};
  const double dir[2] = {dx, dy};
  for (int a = 0; a < 2; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (pos[a] <= lo || pos[a] >= hi) return hits;
    } else {
      double ta = (lo - pos[a]) / dir[a];
      double tb = (hi - pos[a]) / dir[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
  }
  if (t1 <= t0) return hits;

  // entry cell, nudged inward to stay off gridlines
  const double nudge = 1e-12 * (1.0 + std::abs(t0));
  auto cell_of = [&](double p) {
    int i = static_cast<int>(std::floor(p - lo));
    return std::clamp(i, 0, n_side - 1);
  };
  int ix = cell_of(sx + (t0 + nudge) * dx);
  int iy = cell_of(sy + (t0 + nudge) * dy);

  const int step_x = dx > 0 ? 1 : -1;
  const int step_y = dy > 0 ? 1 : -1;
  auto next_cross = [&](double p, double d, int i) {
    if (std::abs(d) < 1e-15) return std::numeric_limits<double>::infinity();
    const double edge = lo + (i + (d > 0 ? 1 : 0));
    return (edge - p) / d;
  };
  double tx = next_cross(sx, dx, ix);
  double ty = next_cross(sy, dy, iy);

  double t = t0;
  while (t < t1 - 1e-12) {
    const double tn = std::min({tx, ty, t1});
    if (tn > t) {
      hits.push_back({n_side - 1 - iy, ix, tn - t});
    }
    t = tn;
    if (t >= t1 - 1e-12) break;
    if (tx <= ty) {
      ix += step_x;
      if (ix < 0 || ix >= n_side) break;
      tx = next_cross(sx, dx, ix);
    } else {
      iy += step_y;
      if (iy < 0 || iy >= n_side) break;
      ty = next_cross(sy, dy, iy);
    }
  }
  return hits;
}

SparseMat build_system_matrix(const FanBeamGeometry& geom,
                              const DiskMask& mask) {
  if (geom.n_side != mask.n_side)
    throw InvalidArgument("geometry and mask disagree on n_side");
  const int nbins = geom.detector_bins;
  const double fan = geom.fan_angle_deg * kPi / 180.0;
  const double d = geom.source_center_distance;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(geom.rows()) * geom.n_side / 2);
  for (int v = 0; v < geom.n_views; ++v) {
    const double theta = geom.view_angle(v);
    const double sx = d * std::cos(theta);
    const double sy = d * std::sin(theta);
    for (int b = 0; b < nbins; ++b) {
      const double gamma = -0.5 * fan + (b + 0.5) * fan / nbins;
      const double phi = theta + kPi + gamma;  // toward the image center
      const int row = v * nbins + b;
      for (const RayHit& h :
           trace_ray(geom.n_side, sx, sy, std::cos(phi), std::sin(phi))) {
        const int j = mask.vec_index(h.row, h.col);
        if (j >= 0 && h.length > 0.0) trip.emplace_back(row, j, h.length);
      }
    }
  }
  SparseMat a(geom.rows(), mask.n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

std::optional<int> full_rank_reference_views(int n_side, int lo, int hi) {
  if (lo > hi) throw InvalidArgument("empty search range");
  const DiskMask mask = build_disk_mask(n_side);
  for (int nv = lo; nv <= hi; ++nv) {
    // fewer rows than columns can never have full column rank
    if (static_cast<long>(2 * n_side) * nv < mask.n) continue;
    const SparseMat a =
        build_system_matrix(FanBeamGeometry::standard(n_side, nv), mask);
    if (is_full_column_rank(a)) return nv;
  }
  return std::nullopt;
}

}  // namespace ctrecov
