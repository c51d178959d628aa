#include "recoding/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace recoding::harness::svg {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 50;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string header(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  return os.str();
}

void axes(std::ostringstream& os, const std::string& x_label, const std::string& y_label,
          double x_max, double y_max) {
  const double x0 = kLeft, y0 = kHeight - kBottom, x1 = kWidth - kRight, y1 = kTop;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y0 - (y0 - y1) * i / 4.0;
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << num(y_max * i / 4.0) << "</text>\n";
    if (x_max > 0) {
      const double x = x0 + (x1 - x0) * i / 4.0;
      os << "<text x=\"" << num(x) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
         << num(x_max * i / 4.0) << "</text>\n";
    }
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (y0 + y1) / 2 << ")\">" << escape(y_label) << "</text>\n";
}

}  // namespace

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  double x_max = 1.0, y_max = 1.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  std::ostringstream os;
  os << header(title);
  axes(os, x_label, y_label, x_max, y_max);
  const double x0 = kLeft, y0 = kHeight - kBottom, x1 = kWidth - kRight, y1 = kTop;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      os << num(x0 + (x1 - x0) * x / x_max) << "," << num(y0 - (y0 - y1) * y / y_max) << " ";
    }
    os << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i);
    os << "<rect x=\"" << x1 + 12 << "\" y=\"" << num(ly) << "\" width=\"12\" height=\"3\" fill=\""
       << color << "\"/>\n"
       << "<text x=\"" << x1 + 30 << "\" y=\"" << num(ly + 5) << "\">" << escape(series[i].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<Bar>& bars, double y_max) {
  std::ostringstream os;
  os << header(title);
  axes(os, "", y_label, 0.0, y_max);
  const double x0 = kLeft, y0 = kHeight - kBottom, x1 = kWidth - kRight, y1 = kTop;
  const double slot = bars.empty() ? 0.0 : (x1 - x0) / static_cast<double>(bars.size());
  auto scale = [&](double v) { return y0 - (y0 - y1) * std::clamp(v / y_max, 0.0, 1.0); };
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double left = x0 + slot * static_cast<double>(i) + slot * 0.15;
    const double width = slot * 0.7;
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(scale(b.value)) << "\" width=\""
       << num(width) << "\" height=\"" << num(y0 - scale(b.value)) << "\" fill=\""
       << kPalette[i % std::size(kPalette)] << "\" fill-opacity=\"0.6\"/>\n"
       << "<rect x=\"" << num(left) << "\" y=\"" << num(scale(b.high)) << "\" width=\""
       << num(width) << "\" height=\"" << num(scale(b.low) - scale(b.high))
       << "\" fill=\"black\" fill-opacity=\"0.2\"/>\n"
       << "<text x=\"" << num(left + width / 2) << "\" y=\"" << y0 + 14
       << "\" text-anchor=\"middle\" font-size=\"9\">" << escape(b.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace recoding::harness::svg
