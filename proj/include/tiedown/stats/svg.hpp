#pragma once

// Minimal deterministic SVG line/step plots: fixed canvas, linear or log
// axes, one polyline per series, legend in the top right corner.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "../error.hpp"

namespace tiedown {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool step = false;
};

struct SvgStyle {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const std::vector<SvgSeries>& series, const SvgStyle& style) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto tx = [&](double v) { return style.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return style.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidParameter("series " + s.label + " has mismatched x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((style.log_x && !(s.x[i] > 0)) || (style.log_y && !(s.y[i] > 0))) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = style.width - left - right, ph = style.height - top - bottom;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };
  using detail::svg_num;

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
       std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + svg_num(style.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::svg_escape(style.title) + "</text>\n";
  o += "<rect x=\"" + svg_num(left) + "\" y=\"" + svg_num(top) + "\" width=\"" + svg_num(pw) + "\" height=\"" +
       svg_num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double vx = style.log_x ? std::pow(10.0, fx) : fx, vy = style.log_y ? std::pow(10.0, fy) : fy;
    const double gx = left + pw * i / 4.0, gy = top + ph - ph * i / 4.0;
    o += "<text x=\"" + svg_num(gx) + "\" y=\"" + svg_num(top + ph + 16) + "\" text-anchor=\"middle\">" +
         detail::svg_label(vx) + "</text>\n";
    o += "<text x=\"" + svg_num(left - 6) + "\" y=\"" + svg_num(gy + 4) + "\" text-anchor=\"end\">" +
         detail::svg_label(vy) + "</text>\n";
  }
  o += "<text x=\"" + svg_num(left + pw / 2) + "\" y=\"" + svg_num(style.height - 10.0) + "\" text-anchor=\"middle\">" +
       detail::svg_escape(style.x_label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + svg_num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       svg_num(top + ph / 2) + ")\">" + detail::svg_escape(style.y_label) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 6];
    std::string pts;
    double prev_y = 0;
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((style.log_x && !(s.x[i] > 0)) || (style.log_y && !(s.y[i] > 0))) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (s.step && !first) pts += svg_num(px(s.x[i])) + "," + svg_num(prev_y) + " ";
      prev_y = py(s.y[i]);
      pts += svg_num(px(s.x[i])) + "," + svg_num(prev_y) + " ";
      first = false;
    }
    if (!pts.empty()) pts.pop_back();
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 16 + 16.0 * static_cast<double>(k);
    o += "<line x1=\"" + svg_num(left + pw - 150) + "\" y1=\"" + svg_num(ly - 4) + "\" x2=\"" + svg_num(left + pw - 130) +
         "\" y2=\"" + svg_num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + svg_num(left + pw - 125) + "\" y=\"" + svg_num(ly) + "\">" + detail::svg_escape(s.label) +
         "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

inline void write_svg(const std::filesystem::path& path, const std::vector<SvgSeries>& series, const SvgStyle& style) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << render_svg(series, style);
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace tiedown
