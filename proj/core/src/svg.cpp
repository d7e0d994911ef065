// SPDX-License-Identifier: Apache-2.0
#include "driftbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace driftbench {

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};
constexpr int kWidth = 720, kHeight = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;
}  // namespace

void SvgPlot::add_series(std::vector<double> x, std::vector<double> y,
                         std::string label, bool points) {
  if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: size mismatch");
  series_.push_back({std::move(x), std::move(y), std::move(label), points});
}

std::string SvgPlot::render() const {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto px = [&](double x) { return kMarginL + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) {
    return kMarginT + plot_h - (y - ymin) / (ymax - ymin) * plot_h;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

  // axes with 5 ticks per side
  out << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT + plot_h << "\" x2=\""
      << kMarginL + plot_w << "\" y2=\"" << kMarginT + plot_h << "\"/>\n";
  out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
      << "\" y2=\"" << kMarginT + plot_h << "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1=\"" << px(fx) << "\" y1=\"" << kMarginT + plot_h << "\" x2=\""
        << px(fx) << "\" y2=\"" << kMarginT + plot_h + 5 << "\"/>\n";
    out << "<text x=\"" << px(fx) << "\" y=\"" << kMarginT + plot_h + 18
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << fx
        << "</text>\n";
    out << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kMarginL
        << "\" y2=\"" << py(fy) << "\"/>\n";
    out << "<text x=\"" << kMarginL - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" << fy << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << kMarginL + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xlabel_ << "</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginT + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << kMarginT + plot_h / 2 << ")\">" << ylabel_
      << "</text>\n";

  for (std::size_t si = 0; si < series_.size(); ++si) {
    const auto& s = series_[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "\"/>\n";
    if (s.points)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << kMarginL + plot_w - 8 << "\" y=\""
        << kMarginT + 16 + 16 * static_cast<int>(si)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << color << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << render();
}

}  // namespace driftbench
