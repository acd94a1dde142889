#pragma once

// Minimal SVG overlay charts: one bar series plus any number of line series
// over a shared numeric x axis.

#include <algorithm>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "genprobe/core.hpp"

namespace genprobe {

enum class SeriesStyle { bars, line };

struct Series {
  std::string name;
  SeriesStyle style = SeriesStyle::line;
  std::vector<std::pair<double, double>> points;
};

/// (bin center, mass) pairs of a numeric histogram; categorical axes use ids.
inline Series series_of(const Histogram& h, std::string name, SeriesStyle style) {
  Series s{std::move(name), style, {}};
  for (const auto& b : h.bins())
    s.points.emplace_back(h.axis().numeric() ? h.axis().center(b.id) : static_cast<double>(b.id), b.mass);
  return s;
}

namespace detail {
inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
}  // namespace detail

inline std::string render_svg(const std::vector<Series>& series, const std::string& title, int width = 640,
                              int height = 360) {
  static const char* palette[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};
  const double ml = 50, mr = 140, mt = 30, mb = 40;
  double x0 = 0, x1 = 1, y1 = 0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) x0 = x1 = x, first = false;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= 0) y1 = 1;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return mt + ph - y / y1 * ph; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::num(ml) + "\" y=\"18\" font-size=\"13\">" + detail::svg_escape(title) + "</text>\n";
  out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(mt + ph) + "\" x2=\"" + detail::num(ml + pw) +
         "\" y2=\"" + detail::num(mt + ph) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(mt) + "\" x2=\"" + detail::num(ml) + "\" y2=\"" +
         detail::num(mt + ph) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y1 * t / 4.0;
    out += "<text x=\"" + detail::num(sx(xv)) + "\" y=\"" + detail::num(mt + ph + 15) + "\" text-anchor=\"middle\">" +
           detail::num(xv) + "</text>\n";
    out += "<text x=\"" + detail::num(ml - 5) + "\" y=\"" + detail::num(sy(yv) + 4) + "\" text-anchor=\"end\">" +
           detail::num(yv) + "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = palette[k % 6];
    if (s.style == SeriesStyle::bars) {
      const double bw = s.points.size() > 1 ? std::max(1.0, pw / static_cast<double>(s.points.size()) * 0.8) : 4.0;
      for (const auto& [x, y] : s.points)
        out += "<rect x=\"" + detail::num(sx(x) - bw / 2) + "\" y=\"" + detail::num(sy(y)) + "\" width=\"" +
               detail::num(bw) + "\" height=\"" + detail::num(mt + ph - sy(y)) + "\" fill=\"" + color +
               "\" fill-opacity=\"0.5\"/>\n";
    } else {
      std::string pts;
      for (const auto& [x, y] : s.points) pts += detail::num(sx(x)) + "," + detail::num(sy(y)) + " ";
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    const double ly = mt + 14.0 * static_cast<double>(k);
    out += "<rect x=\"" + detail::num(width - mr + 10) + "\" y=\"" + detail::num(ly) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + detail::num(width - mr + 25) + "\" y=\"" + detail::num(ly + 9) + "\">" +
           detail::svg_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace genprobe
