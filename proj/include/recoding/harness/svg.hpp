#pragma once

#include <string>
#include <utility>
#include <vector>

namespace recoding::harness::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Bar {
  std::string label;
  double value = 0.0;
  double low = 0.0;   // IQR band
  double high = 0.0;
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<Bar>& bars, double y_max);

std::string escape(const std::string& s);

}  // namespace recoding::harness::svg
