#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrecov/sparse.hpp"

namespace ctrecov {

// Grid conventions used throughout:
//   - pixels have side 1; the image occupies the box [-n/2, n/2]^2
//   - pixel (row r, col c) has center (c + 0.5 - n/2, n/2 - (r + 0.5)),
//     i.e. row 0 is the top of the image and y points up
//   - a pixel is inside the mask iff its center lies strictly within the
//     largest inscribed disk (radius n/2 about the origin)

struct DiskMask {
  int n_side = 0;
  int n = 0;                       // number of inside pixels
  std::vector<std::uint8_t> inside;  // n_side*n_side, row-major
  std::vector<int> grid_to_vec;    // -1 for outside pixels
  std::vector<int> vec_to_grid;    // size n

  bool is_inside(int row, int col) const {
    return inside[static_cast<std::size_t>(row) * n_side + col] != 0;
  }
  int vec_index(int row, int col) const {
    return grid_to_vec[static_cast<std::size_t>(row) * n_side + col];
  }
};

DiskMask build_disk_mask(int n_side);

void write_mask_json(const DiskMask& mask, const std::string& path);
DiskMask read_mask_json(const std::string& path);

// Equi-angular fan-beam geometry over 360 degrees. The source orbits the
// image center at distance source_center_distance; the detector is a
// circular arc centered at the source, so ray paths depend only on the
// angular bin positions within the fan. One infinitesimally thin ray per
// bin, through the bin's angular center.
struct FanBeamGeometry {
  int n_side = 0;
  int n_views = 0;
  double source_center_distance = 0.0;  // default 2*n_side
  int detector_bins = 0;                // default 2*n_side
  double fan_angle_deg = 28.07;         // covers the inscribed disk
  double start_angle_deg = 0.0;         // first view: source due east

  static FanBeamGeometry standard(int n_side, int n_views,
                                  double start_angle_deg = 0.0);

  long rows() const {
    return static_cast<long>(detector_bins) * n_views;
  }
  // view angle in radians for view index t
  double view_angle(int t) const;
};

// One traversed pixel of a ray: grid position and intersection length.
struct RayHit {
  int row;
  int col;
  double length;
};

// Exact lengths of the segments of the line (sx,sy) + t*(dx,dy), t >= 0,
// inside each grid pixel, by incremental parametric traversal.
std::vector<RayHit> trace_ray(int n_side, double sx, double sy, double dx,
                              double dy);

// m-by-n system matrix, m = detector_bins * n_views; entry (i,j) is the
// intersection length of ray i with inside-pixel j. Rays that miss the disk
// contribute all-zero rows, which are kept.
SparseMat build_system_matrix(const FanBeamGeometry& geom,
                              const DiskMask& mask);

// Smallest view count in [lo, hi] whose system matrix has full column rank;
// defines the full-sampling reference point for relative sampling.
std::optional<int> full_rank_reference_views(int n_side, int lo, int hi);

}  // namespace ctrecov
