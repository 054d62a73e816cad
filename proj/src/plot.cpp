#include "edcho/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace edcho::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;
constexpr std::size_t kMaxPoints = 1500;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return log ? std::log10(v) : v; }

  void fit(const std::vector<double>& values) {
    double a = std::numeric_limits<double>::infinity();
    double b = -a;
    for (double v : values) {
      if (!usable(v)) continue;
      a = std::min(a, map(v));
      b = std::max(b, map(v));
    }
    if (!std::isfinite(a)) {
      a = 0.0;
      b = 1.0;
    }
    if (b - a < 1e-12) {
      a -= 0.5;
      b += 0.5;
    }
    if (log) {
      a = std::floor(a);
      b = std::ceil(b);
    }
    lo = a;
    hi = b;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int step = std::max(1, static_cast<int>((hi - lo) / 8.0));
      for (double e = lo; e <= hi + 1e-9; e += step) out.push_back(e);
      return out;
    }
    for (int k = 0; k <= 5; ++k) out.push_back(lo + (hi - lo) * k / 5.0);
    return out;
  }
};

void render_panel(std::ostringstream& svg, const Panel& panel, double top, double width, double height) {
  Axis ax{0, 1, panel.log_x};
  Axis ay{0, 1, panel.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : panel.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  ax.fit(xs);
  ay.fit(ys);

  const double left = kMarginLeft;
  const double plot_w = width - kMarginLeft - kMarginRight;
  const double plot_h = height - kMarginTop - kMarginBottom;
  const double y0 = top + kMarginTop;
  auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * plot_w; };
  auto py = [&](double v) { return y0 + plot_h - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * plot_h; };

  svg << "<text x=\"" << num(left) << "\" y=\"" << num(top + 18) << "\" font-size=\"13\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(y0) << "\" width=\"" << num(plot_w) << "\" height=\""
      << num(plot_h) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  for (double t : ax.ticks()) {
    const double x = left + (t - ax.lo) / (ax.hi - ax.lo) * plot_w;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0 + plot_h) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(y0 + plot_h + 4) << "\" stroke=\"#000\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + plot_h + 16)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(ax.log ? std::pow(10.0, t) : t)
        << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = y0 + plot_h - (t - ay.lo) / (ay.hi - ay.lo) * plot_h;
    svg << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(y) << "\" stroke=\"#000\"/>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 3) << "\" font-size=\"10\" text-anchor=\"end\">"
        << tick_label(ay.log ? std::pow(10.0, t) : t) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(y0 + plot_h + 32)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << num(y0 + plot_h / 2) << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << num(y0 + plot_h / 2) << ")\">" << escape(panel.y_label) << "</text>\n";

  std::size_t palette_index = 0;
  double legend_y = y0 + 10;
  for (const auto& s : panel.series) {
    const std::string color =
        s.color.empty() ? kPalette[palette_index++ % std::size(kPalette)] : s.color;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t step = std::max<std::size_t>(1, n / kMaxPoints);
    std::string points;
    auto flush = [&]() {
      if (points.empty()) return;
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(s.width)
          << "\" points=\"" << points << "\"/>\n";
      points.clear();
    };
    std::vector<std::size_t> picks;
    for (std::size_t k = 0; k < n; k += step) picks.push_back(k);
    if (n > 0 && picks.back() != n - 1) picks.push_back(n - 1);
    for (std::size_t k : picks) {
      if (!ax.usable(s.x[k]) || !ay.usable(s.y[k])) {
        flush();
        continue;
      }
      points += num(px(s.x[k])) + "," + num(std::clamp(py(s.y[k]), y0, y0 + plot_h)) + " ";
    }
    flush();
    if (!s.label.empty()) {
      const double lx = left + plot_w + 10;
      svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y) << "\" x2=\"" << num(lx + 18) << "\" y2=\""
          << num(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(legend_y + 4) << "\" font-size=\"10\">"
          << escape(s.label) << "</text>\n";
      legend_y += 14;
    }
  }
}

}  // namespace

std::string render_svg(const Figure& fig) {
  const double title_h = fig.title.empty() ? 0.0 : 30.0;
  const double total_h = title_h + fig.panel_height * static_cast<double>(fig.panels.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(fig.panel_width) << "\" height=\""
      << num(total_h) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (!fig.title.empty()) {
    svg << "<text x=\"" << num(fig.panel_width / 2) << "\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">"
        << escape(fig.title) << "</text>\n";
  }
  for (std::size_t p = 0; p < fig.panels.size(); ++p) {
    render_panel(svg, fig.panels[p], title_h + fig.panel_height * static_cast<double>(p), fig.panel_width,
                 fig.panel_height);
  }
  svg << "</svg>\n";
  return svg.str();
}

Figure trajectory_figure(const Trace& trace, const SignalBank& bank, const std::string& title) {
  Figure fig;
  fig.title = title;
  if (trace.size() == 0) return fig;
  const auto agents = trace.outputs.front().rows();
  const auto cols = trace.outputs.front().cols();

  for (Eigen::Index mu = 0; mu < cols; ++mu) {
    Panel panel;
    panel.title = "y_i," + std::to_string(mu) + "(t) and average derivative " + std::to_string(mu);
    panel.x_label = "t";
    panel.y_label = "y_" + std::to_string(mu);
    for (Eigen::Index i = 0; i < agents; ++i) {
      Series s;
      s.label = "agent " + std::to_string(i);
      s.x = trace.times;
      for (const auto& y : trace.outputs) s.y.push_back(y(i, mu));
      panel.series.push_back(std::move(s));
    }
    Series avg;
    avg.label = "average";
    avg.color = "#d62728";
    avg.width = 2.0;
    avg.x = trace.times;
    for (double t : trace.times) avg.y.push_back(average_derivative(bank, static_cast<int>(mu), t));
    panel.series.push_back(std::move(avg));
    fig.panels.push_back(std::move(panel));
  }

  Panel err;
  err.title = "consensus error norms";
  err.x_label = "t";
  err.y_label = "||Y~_mu||";
  err.log_y = true;
  for (Eigen::Index mu = 0; mu < cols; ++mu) {
    Series s;
    s.label = "mu = " + std::to_string(mu);
    s.x = trace.times;
    for (const auto& e : trace.error_norms) s.y.push_back(e(mu));
    err.series.push_back(std::move(s));
  }
  fig.panels.push_back(std::move(err));
  return fig;
}

Figure comparison_figure(const std::vector<std::string>& names, const std::vector<const Trace*>& traces) {
  Figure fig;
  fig.title = "protocol comparison";
  Panel panel;
  panel.title = "||Y~_0(t)||";
  panel.x_label = "t";
  panel.y_label = "||Y~_0||";
  panel.log_y = true;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    Series s;
    s.label = k < names.size() ? names[k] : std::to_string(k);
    s.x = traces[k]->times;
    for (const auto& e : traces[k]->error_norms) s.y.push_back(e(0));
    panel.series.push_back(std::move(s));
  }
  fig.panels.push_back(std::move(panel));
  return fig;
}

Figure sweep_figure(const std::vector<AccuracyRow>& rows, const std::string& title) {
  Figure fig;
  fig.title = title;
  Panel panel;
  panel.title = "terminal error vs step size";
  panel.x_label = "dt";
  panel.y_label = "terminal ||Y~_mu||";
  panel.log_x = true;
  panel.log_y = true;
  const Eigen::Index cols = rows.empty() ? 0 : rows.front().terminal_error.size();
  for (Eigen::Index mu = 0; mu < cols; ++mu) {
    Series s;
    s.label = "mu = " + std::to_string(mu);
    s.width = 1.5;
    for (const auto& r : rows) {
      s.x.push_back(r.dt);
      s.y.push_back(r.terminal_error(mu));
    }
    panel.series.push_back(std::move(s));
  }
  fig.panels.push_back(std::move(panel));
  return fig;
}

}  // namespace edcho::plot
