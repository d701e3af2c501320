#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace sle {

// Minimal self-contained SVG plots: a histogram with an optional analytic
// density overlay, and empirical-CDF overlays. No external renderer.
namespace svg {

constexpr int kW = 640, kH = 420, kPad = 50;

inline double sx(double x, double lo, double hi) {
  return kPad + (x - lo) / (hi - lo) * (kW - 2 * kPad);
}
inline double sy(double y, double lo, double hi) {
  return kH - kPad - (y - lo) / (hi - lo) * (kH - 2 * kPad);
}

inline void header(std::ostream& os, const std::string& title) {
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH << "'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n"
     << "<text x='" << kW / 2 << "' y='20' text-anchor='middle' font-size='14' "
     << "font-family='sans-serif'>" << title << "</text>\n";
}

inline void axes(std::ostream& os, double xlo, double xhi, double ylo, double yhi) {
  os << "<line x1='" << kPad << "' y1='" << kH - kPad << "' x2='" << kW - kPad << "' y2='"
     << kH - kPad << "' stroke='black'/>\n"
     << "<line x1='" << kPad << "' y1='" << kPad << "' x2='" << kPad << "' y2='" << kH - kPad
     << "' stroke='black'/>\n";
  for (int i = 0; i <= 4; ++i) {
    double x = xlo + (xhi - xlo) * i / 4.0;
    double y = ylo + (yhi - ylo) * i / 4.0;
    os << "<text x='" << sx(x, xlo, xhi) << "' y='" << kH - kPad + 16
       << "' text-anchor='middle' font-size='10' font-family='sans-serif'>" << x << "</text>\n";
    os << "<text x='" << kPad - 6 << "' y='" << sy(y, ylo, yhi) + 3
       << "' text-anchor='end' font-size='10' font-family='sans-serif'>" << y << "</text>\n";
  }
}

inline void polyline(std::ostream& os, const std::vector<std::pair<double, double>>& pts,
                     double xlo, double xhi, double ylo, double yhi, const std::string& color) {
  os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
  for (const auto& p : pts) os << sx(p.first, xlo, xhi) << "," << sy(p.second, ylo, yhi) << " ";
  os << "'/>\n";
}

}  // namespace svg

inline void write_histogram_svg(const std::string& filename, std::vector<double> samples,
                                size_t n_bins, const std::string& title,
                                const std::function<double(double)>& density = nullptr) {
  if (samples.empty()) return;
  std::sort(samples.begin(), samples.end());
  double lo = samples.front(), hi = samples.back();
  if (hi <= lo) hi = lo + 1.0;
  std::vector<double> counts(n_bins, 0.0);
  for (double s : samples) {
    size_t b = std::min(n_bins - 1, size_t((s - lo) / (hi - lo) * n_bins));
    counts[b] += 1.0;
  }
  double bw = (hi - lo) / double(n_bins);
  for (double& c : counts) c /= double(samples.size()) * bw;  // density normalization
  double ymax = *std::max_element(counts.begin(), counts.end());
  if (density) {
    for (int i = 0; i <= 200; ++i)
      ymax = std::max(ymax, density(lo + (hi - lo) * i / 200.0));
  }
  ymax *= 1.05;
  std::ofstream os(filename);
  svg::header(os, title);
  svg::axes(os, lo, hi, 0.0, ymax);
  for (size_t b = 0; b < n_bins; ++b) {
    double x0 = svg::sx(lo + b * bw, lo, hi), x1 = svg::sx(lo + (b + 1) * bw, lo, hi);
    double y0 = svg::sy(counts[b], 0, ymax), y1 = svg::sy(0, 0, ymax);
    os << "<rect x='" << x0 << "' y='" << y0 << "' width='" << x1 - x0 << "' height='"
       << y1 - y0 << "' fill='steelblue' fill-opacity='0.6'/>\n";
  }
  if (density) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= 200; ++i) {
      double x = lo + (hi - lo) * i / 200.0;
      pts.push_back({x, density(x)});
    }
    svg::polyline(os, pts, lo, hi, 0, ymax, "crimson");
  }
  os << "</svg>\n";
}

inline void write_cdf_overlay_svg(const std::string& filename, std::vector<double> a,
                                  const std::string& label_a, std::vector<double> b,
                                  const std::string& label_b, const std::string& title) {
  if (a.empty() || b.empty()) return;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double lo = std::min(a.front(), b.front()), hi = std::max(a.back(), b.back());
  if (hi <= lo) hi = lo + 1.0;
  std::ofstream os(filename);
  svg::header(os, title);
  svg::axes(os, lo, hi, 0.0, 1.0);
  auto ecdf_pts = [&](const std::vector<double>& v) {
    std::vector<std::pair<double, double>> pts{{lo, 0.0}};
    for (size_t i = 0; i < v.size(); ++i) pts.push_back({v[i], double(i + 1) / double(v.size())});
    pts.push_back({hi, 1.0});
    return pts;
  };
  svg::polyline(os, ecdf_pts(a), lo, hi, 0, 1, "steelblue");
  svg::polyline(os, ecdf_pts(b), lo, hi, 0, 1, "crimson");
  os << "<text x='" << svg::kW - svg::kPad << "' y='" << svg::kPad
     << "' text-anchor='end' font-size='11' fill='steelblue' font-family='sans-serif'>" << label_a
     << "</text>\n";
  os << "<text x='" << svg::kW - svg::kPad << "' y='" << svg::kPad + 14
     << "' text-anchor='end' font-size='11' fill='crimson' font-family='sans-serif'>" << label_b
     << "</text>\n";
  os << "</svg>\n";
}

}  // namespace sle
