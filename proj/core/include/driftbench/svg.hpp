// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace driftbench {

/// Minimal standalone SVG 1.1 line plot; enough for log-log error plots,
/// density overlays and trace plots without a display server.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add_series(std::vector<double> x, std::vector<double> y, std::string label,
                  bool points = true);
  std::string render() const;
  void save(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string label;
    bool points;
  };
  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace driftbench
