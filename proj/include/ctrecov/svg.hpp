#pragma once

#include <string>
#include <vector>

#include "ctrecov/imagegen.hpp"

namespace ctrecov {

// Heatmap of recovery fractions over (relative sparsity, relative sampling).
// values[i][j] is the fraction for kappas[i] and mus[j]; NaN cells are left
// blank.
void write_heatmap_svg(const std::vector<double>& kappas,
                       const std::vector<double>& mus,
                       const std::vector<std::vector<double>>& values,
                       const std::string& title, const std::string& path);

struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // error-bar half-widths; empty for none
};

void write_curves_svg(const std::vector<CurveSeries>& series,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& title, const std::string& path);

// grayscale rendering of a masked image on its grid
void write_image_svg(const MaskedImage& img, const DiskMask& mask,
                     const std::string& path);

}  // namespace ctrecov
