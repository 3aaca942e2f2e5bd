#pragma once

#include <string>
#include <vector>

namespace itef::cli {

struct Series {
  std::string name;
  std::vector<double> x, y;  // positive values, plotted on log-log axes
};

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

}  // namespace itef::cli
