#include "chisqalt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <vector>

namespace chisqalt {

namespace {

constexpr int kWidth = 800, kHeight = 520;
constexpr int kLeft = 70, kRight = 200, kTop = 30, kBottom = 60;

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Series {
  std::string method;
  std::vector<std::pair<double, double>> points;  // param -> value
  double mean = 0.0;
};

}  // namespace

std::string render_svg(const PowerTable& table, std::string_view style) {
  std::map<std::string, Series> by_method;
  std::vector<std::string> method_order;
  double x_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool first = true;
  for (const PowerRow& row : table.rows) {
    if (row.study.ends_with("-mean")) continue;
    auto [it, inserted] = by_method.try_emplace(row.method);
    if (inserted) {
      it->second.method = row.method;
      method_order.push_back(row.method);
    }
    it->second.points.emplace_back(row.param, row.power);
    if (first) {
      x_min = x_max = row.param;
      first = false;
    }
    x_min = std::min(x_min, row.param);
    x_max = std::max(x_max, row.param);
    y_max = std::max(y_max, row.power);
  }
  if (by_method.empty()) throw std::invalid_argument("render_svg: empty table");
  if (x_max == x_min) x_max = x_min + 1.0;
  y_max = std::max(1.0, y_max * 1.05);

  for (auto& [name, s] : by_method) {
    std::sort(s.points.begin(), s.points.end());
    double acc = 0.0;
    for (auto& [p, v] : s.points) acc += v;
    s.mean = acc / static_cast<double>(s.points.size());
  }
  // legend (and draw order) sorted by mean power, best first
  std::stable_sort(method_order.begin(), method_order.end(),
                   [&](const std::string& a, const std::string& b) {
                     return by_method[a].mean > by_method[b].mean;
                   });

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + (1.0 - y / y_max) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes and ticks
  svg += "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kTop + plot_h) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (int t = 0; t <= 5; ++t) {
    double xv = x_min + (x_max - x_min) * t / 5.0;
    double yv = y_max * t / 5.0;
    svg += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + label_num(xv) + "</text>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(yv) + 4) +
           "\" text-anchor=\"end\">" + label_num(yv) + "</text>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(yv)) + "\" x2=\"" +
           num(kLeft + plot_w) + "\" y2=\"" + num(sy(yv)) +
           "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  svg += "</g>\n";

  const bool bars = style == "bar";
  int color_index = 0;
  std::map<std::string, std::string> colors;
  for (const std::string& m : method_order) {
    colors[m] = m == "RG" ? "#000000" : kPalette[color_index % 9];
    if (m != "RG") ++color_index;
  }

  if (bars) {
    const double group_w = plot_w / static_cast<double>(by_method.begin()->second.points.size());
    const double bar_w = group_w / (static_cast<double>(method_order.size()) + 1.0);
    for (std::size_t mi = 0; mi < method_order.size(); ++mi) {
      const Series& s = by_method[method_order[mi]];
      svg += "<g fill=\"" + colors[s.method] + "\">\n";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        double x = kLeft + group_w * static_cast<double>(i) + bar_w * static_cast<double>(mi);
        double y = sy(s.points[i].second);
        svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bar_w) +
               "\" height=\"" + num(kTop + plot_h - y) + "\"/>\n";
      }
      svg += "</g>\n";
    }
  } else {
    for (const std::string& m : method_order) {
      const Series& s = by_method[m];
      const bool highlight = m == "RG";
      std::string points;
      for (const auto& [x, y] : s.points)
        points += num(sx(x)) + "," + num(sy(y)) + " ";
      svg += "<polyline fill=\"none\" stroke=\"" + colors[m] + "\" stroke-width=\"" +
             (highlight ? std::string("3") : std::string("1.5")) + "\" points=\"" + points +
             "\"/>\n";
      if (highlight) {
        for (const auto& [x, y] : s.points)
          svg += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) +
                 "\" r=\"3\" fill=\"#000000\"/>\n";
      }
    }
  }

  // legend, best mean power first
  svg += "<g font-family=\"sans-serif\" font-size=\"13\">\n";
  for (std::size_t mi = 0; mi < method_order.size(); ++mi) {
    const Series& s = by_method[method_order[mi]];
    double ly = kTop + 10 + 20.0 * static_cast<double>(mi);
    svg += "<line x1=\"" + num(kWidth - kRight + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kWidth - kRight + 45) + "\" y2=\"" + num(ly) + "\" stroke=\"" +
           colors[s.method] + "\" stroke-width=\"" + (s.method == "RG" ? "3" : "1.5") +
           "\"/>\n";
    svg += "<text x=\"" + num(kWidth - kRight + 52) + "\" y=\"" + num(ly + 4) + "\">" +
           s.method + " (" + label_num(s.mean) + ")</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace chisqalt
