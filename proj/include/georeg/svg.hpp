#pragma once

#include <optional>
#include <string>
#include <vector>

#include "georeg/experiments.hpp"
#include "georeg/perturbation.hpp"

namespace georeg {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;  // optional error bars
  bool connect = true;        // polyline between points; false draws markers only
  std::optional<CorrelationLine> fit_line;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::optional<double> vertical_line;
  std::vector<PlotSeries> series;
};

/// Panels are stacked vertically. Output depends only on the inputs.
std::string render_svg(const std::vector<PlotPanel>& panels);

std::string sweep_svg(const SweepResult& result);
std::string bias_variance_svg(const SweepResult& result);
std::string perturbation_svg(const PerturbationResult& result);

}  // namespace georeg
