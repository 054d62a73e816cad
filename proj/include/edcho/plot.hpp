#pragma once

#include <string>
#include <vector>

#include "edcho/engine.hpp"
#include "edcho/scenario.hpp"
#include "edcho/signals.hpp"

namespace edcho::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty picks from the palette
  double width = 1.0;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

struct Figure {
  std::string title;
  std::vector<Panel> panels;
  double panel_width = 720.0;
  double panel_height = 240.0;
};

/// Stacks the panels vertically. Non-positive values on a log axis split
/// the polyline; series longer than 1500 points are thinned.
std::string render_svg(const Figure& fig);

/// One panel per mu with y_{i,mu}(t) for every agent and the average
/// derivative in red, plus a log-scale panel of the error norms.
Figure trajectory_figure(const Trace& trace, const SignalBank& bank, const std::string& title);

/// Log-scale ||Y~_0|| of several runs on one panel.
Figure comparison_figure(const std::vector<std::string>& names, const std::vector<const Trace*>& traces);

/// Terminal error per mu against dt, log-log.
Figure sweep_figure(const std::vector<AccuracyRow>& rows, const std::string& title);

}  // namespace edcho::plot
