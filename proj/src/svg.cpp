#include "ctrecov/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ctrecov {

namespace {

struct SvgFile {
  std::FILE* f = nullptr;
  explicit SvgFile(const std::string& path, int w, int h) {
    f = std::fopen(path.c_str(), "w");
    if (!f) throw InvalidArgument("cannot open for writing: " + path);
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                 "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                 w, h, w, h);
    std::fprintf(f, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", w,
                 h);
  }
  ~SvgFile() {
    if (f) {
      std::fprintf(f, "</svg>\n");
      std::fclose(f);
    }
  }
  void rect(double x, double y, double w, double h, int gray) {
    std::fprintf(f,
                 "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                 "fill=\"rgb(%d,%d,%d)\"/>\n",
                 x, y, w, h, gray, gray, gray);
  }
  void line(double x1, double y1, double x2, double y2, const char* color,
            double width = 1.0) {
    std::fprintf(f,
                 "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                 "stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
                 x1, y1, x2, y2, color, width);
  }
  void text(double x, double y, const std::string& s, int size = 11,
            const char* anchor = "middle") {
    std::fprintf(f,
                 "<text x=\"%.2f\" y=\"%.2f\" font-size=\"%d\" "
                 "font-family=\"sans-serif\" text-anchor=\"%s\">%s</text>\n",
                 x, y, size, anchor, s.c_str());
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b"};

}  // namespace

void write_heatmap_svg(const std::vector<double>& kappas,
                       const std::vector<double>& mus,
                       const std::vector<std::vector<double>>& values,
                       const std::string& title, const std::string& path) {
  const int nx = static_cast<int>(kappas.size());
  const int ny = static_cast<int>(mus.size());
  const double cell = std::max(8.0, std::min(28.0, 480.0 / std::max(nx, ny)));
  const double x0 = 70, y0 = 40;
  const int width = static_cast<int>(x0 + nx * cell + 40);
  const int height = static_cast<int>(y0 + ny * cell + 60);
  SvgFile svg(path, width, height);
  svg.text(width / 2.0, 22, title, 13);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = values[i][j];
      if (std::isnan(v)) continue;
      // high fraction bright, drawn with mu increasing upward
      const int gray = static_cast<int>(std::lround(255.0 * v));
      svg.rect(x0 + i * cell, y0 + (ny - 1 - j) * cell, cell, cell, gray);
    }
  }
  for (int i = 0; i < nx; ++i)
    if (nx <= 14 || i % 2 == 0)
      svg.text(x0 + (i + 0.5) * cell, y0 + ny * cell + 14, fmt(kappas[i]), 10);
  for (int j = 0; j < ny; ++j)
    if (ny <= 14 || j % 2 == 0)
      svg.text(x0 - 8, y0 + (ny - 1 - j + 0.7) * cell, fmt(mus[j]), 10, "end");
  svg.text(x0 + nx * cell / 2.0, y0 + ny * cell + 34, "relative sparsity", 11);
  svg.text(16, y0 + ny * cell / 2.0, "mu", 11);
}

void write_curves_svg(const std::vector<CurveSeries>& series,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& title, const std::string& path) {
  const int width = 560, height = 420;
  const double x0 = 70, y0 = 40, x1 = width - 30, y1 = height - 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      const double e = s.err.empty() ? 0.0 : s.err[i];
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  const auto px = [&](double x) {
    return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
  };
  const auto py = [&](double y) {
    return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0);
  };

  SvgFile svg(path, width, height);
  svg.text(width / 2.0, 22, title, 13);
  svg.line(x0, y1, x1, y1, "black");
  svg.line(x0, y0, x0, y1, "black");
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + t * (xmax - xmin) / 5;
    const double yv = ymin + t * (ymax - ymin) / 5;
    svg.text(px(xv), y1 + 16, fmt(xv), 10);
    svg.text(x0 - 6, py(yv) + 4, fmt(yv), 10, "end");
  }
  svg.text((x0 + x1) / 2, height - 18, x_label, 11);
  svg.text(18, (y0 + y1) / 2, y_label, 11);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kSeriesColors[si % 6];
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
      svg.line(px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), color,
               1.6);
    if (!s.err.empty()) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg.line(px(s.x[i]), py(s.y[i] - s.err[i]), px(s.x[i]),
                 py(s.y[i] + s.err[i]), color, 1.0);
        svg.line(px(s.x[i]) - 3, py(s.y[i] - s.err[i]), px(s.x[i]) + 3,
                 py(s.y[i] - s.err[i]), color, 1.0);
        svg.line(px(s.x[i]) - 3, py(s.y[i] + s.err[i]), px(s.x[i]) + 3,
                 py(s.y[i] + s.err[i]), color, 1.0);
      }
    }
    svg.text(x1 - 8, y0 + 16 + 16 * static_cast<double>(si), s.label, 11,
             "end");
    svg.line(x1 - 70, y0 + 12 + 16 * static_cast<double>(si), x1 - 56,
             y0 + 12 + 16 * static_cast<double>(si), color, 2.0);
  }
}

void write_image_svg(const MaskedImage& img, const DiskMask& mask,
                     const std::string& path) {
  if (img.values.size() != mask.n)
    throw InvalidArgument("image and mask sizes disagree");
  const int ns = mask.n_side;
  const double cell = std::max(2.0, 320.0 / ns);
  double lo = 0.0, hi = 1.0;
  if (img.values.size()) {
    lo = std::min(0.0, img.values.minCoeff());
    hi = std::max(lo + 1e-30, static_cast<double>(img.values.maxCoeff()));
  }
  SvgFile svg(path, static_cast<int>(ns * cell), static_cast<int>(ns * cell));
  for (int r = 0; r < ns; ++r)
    for (int c = 0; c < ns; ++c) {
      const int j = mask.vec_index(r, c);
      const int gray =
          j < 0 ? 0
                : static_cast<int>(std::lround(
                      255.0 * (img.values(j) - lo) / (hi - lo)));
      svg.rect(c * cell, r * cell, cell, cell, std::clamp(gray, 0, 255));
    }
}

}  // namespace ctrecov
