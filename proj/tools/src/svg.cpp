#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hypersde::cli {

namespace {

constexpr double width = 640, height = 400, left = 70, right = 150, top = 40, bottom = 50;
const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg_chart(std::ostream& os, const std::string& title, const std::vector<Series>& series,
                     const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"start\">" << label(x0)
     << "</text>\n";
  os << "<text x=\"" << fixed(left + pw) << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"end\">"
     << label(x1) << "</text>\n";
  os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(top + ph + 38) << "\" text-anchor=\"middle\">"
     << escape(x_label) << "</text>\n";
  os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(top + ph) << "\" text-anchor=\"end\">" << label(y0)
     << "</text>\n";
  os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(top + 10) << "\" text-anchor=\"end\">" << label(y1)
     << "</text>\n";
  if (!y_label.empty())
    os << "<text x=\"14\" y=\"" << fixed(top + ph / 2) << "\" transform=\"rotate(-90 14 " << fixed(top + ph / 2)
       << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = palette[s % std::size(palette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i) {
      if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
      os << (first ? "" : " ") << fixed(px(series[s].x[i])) << ',' << fixed(py(series[s].y[i]));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 12 + 18 * static_cast<double>(s);
    os << "<line x1=\"" << fixed(left + pw + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(left + pw + 30)
       << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fixed(left + pw + 35) << "\" y=\"" << fixed(ly) << "\">" << escape(series[s].name)
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace hypersde::cli
