#include "georeg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace georeg {

namespace {

constexpr double kWidth = 720, kPanelHeight = 360;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 50;

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
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double px0 = 0, px1 = 1;  // pixel range

  double map(double v) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0); }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::floor(lo); e <= std::ceil(hi); e += 1)
        if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(std::pow(10.0, e));
      if (t.size() < 2) t = {std::pow(10.0, lo), std::pow(10.0, hi)};
      return t;
    }
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0})
      if (raw <= f * mag) {
        step = f * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
      t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return t;
  }
};

Axis make_axis(std::vector<double> values, bool log, double px0, double px1) {
  Axis a;
  a.log = log;
  a.px0 = px0;
  a.px1 = px1;
  values.erase(std::remove_if(values.begin(), values.end(),
                              [&](double v) { return !a.usable(v); }),
               values.end());
  if (values.empty()) values = log ? std::vector<double>{1, 10} : std::vector<double>{0, 1};
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  if (log) {
    lo = std::log10(lo);
    hi = std::log10(hi);
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
    a.lo = lo - 0.05 * (hi - lo);
    a.hi = hi + 0.05 * (hi - lo);
  } else {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    a.lo = lo - 0.05 * (hi - lo);
    a.hi = hi + 0.05 * (hi - lo);
  }
  return a;
}

void render_panel(std::ostringstream& svg, const PlotPanel& panel, double y0) {
  const double x_px0 = kLeft, x_px1 = kWidth - kRight;
  const double y_px0 = y0 + kPanelHeight - kBottom, y_px1 = y0 + kTop;

  std::vector<double> xs, ys;
  for (const PlotSeries& s : panel.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      ys.push_back(s.y[i]);
      if (i < s.y_err.size() && std::isfinite(s.y_err[i])) {
        ys.push_back(s.y[i] + s.y_err[i]);
        if (!panel.log_y) ys.push_back(s.y[i] - s.y_err[i]);
      }
    }
  }
  if (panel.vertical_line) xs.push_back(*panel.vertical_line);
  const Axis ax = make_axis(xs, panel.log_x, x_px0, x_px1);
  const Axis ay = make_axis(ys, panel.log_y, y_px0, y_px1);

  svg << "<g>\n";
  svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(y0 + 22)
      << "\" text-anchor=\"middle\" font-size=\"15\">" << escape(panel.title) << "</text>\n";
  svg << "<rect x=\"" << num(x_px0) << "\" y=\"" << num(y_px1) << "\" width=\""
      << num(x_px1 - x_px0) << "\" height=\"" << num(y_px0 - y_px1)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(y_px0) << "\" x2=\"" << num(px)
        << "\" y2=\"" << num(y_px0 + 5) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(px) << "\" y=\"" << num(y_px0 + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    svg << "<line x1=\"" << num(x_px0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x_px1)
        << "\" y2=\"" << num(py) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(x_px0 - 8) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(t) << "</text>\n";
  }
  svg << "<text x=\"" << num((x_px0 + x_px1) / 2) << "\" y=\"" << num(y_px0 + 38)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text transform=\"translate(" << num(22) << ' ' << num((y_px0 + y_px1) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.y_label)
      << "</text>\n";

  if (panel.vertical_line && ax.usable(*panel.vertical_line)) {
    const double px = ax.map(*panel.vertical_line);
    svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(y_px0) << "\" x2=\"" << num(px)
        << "\" y2=\"" << num(y_px1) << "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const PlotSeries& s = panel.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.connect) {
      std::string path;
      bool pen_down = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
          pen_down = false;
          continue;
        }
        path += (pen_down ? " L" : " M") + num(ax.map(s.x[i])) + ' ' + num(ay.map(s.y[i]));
        pen_down = true;
      }
      if (!path.empty())
        svg << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.8\"/>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      const double px = ax.map(s.x[i]), py = ay.map(s.y[i]);
      if (i < s.y_err.size() && std::isfinite(s.y_err[i]) && s.y_err[i] > 0) {
        const double lo = s.y[i] - s.y_err[i], hi = s.y[i] + s.y_err[i];
        const double plo = ay.usable(lo) ? ay.map(lo) : y_px0;
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(plo) << "\" x2=\"" << num(px)
            << "\" y2=\"" << num(ay.map(hi)) << "\" stroke=\"" << s.color << "\"/>\n";
      }
      svg << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\""
          << (s.connect ? "3" : "2.2") << "\" fill=\"" << s.color << "\""
          << (s.connect ? "" : " fill-opacity=\"0.6\"") << "/>\n";
    }
    if (s.fit_line) {
      const double xa = ax.log ? std::pow(10.0, ax.lo) : ax.lo;
      const double xb = ax.log ? std::pow(10.0, ax.hi) : ax.hi;
      const double ya = s.fit_line->intercept + s.fit_line->slope * xa;
      const double yb = s.fit_line->intercept + s.fit_line->slope * xb;
      if (ay.usable(ya) && ay.usable(yb))
        svg << "<line x1=\"" << num(ax.map(xa)) << "\" y1=\"" << num(ay.map(ya)) << "\" x2=\""
            << num(ax.map(xb)) << "\" y2=\"" << num(ay.map(yb)) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" clip-path=\"url(#clip" << num(y0) << ")\"/>\n";
    }
    const double ly = y_px1 + 14 + 18 * static_cast<double>(k);
    svg << "<rect x=\"" << num(x_px1 + 14) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" "
        << "height=\"12\" fill=\"" << s.color << "\"/>\n";
    svg << "<text x=\"" << num(x_px1 + 32) << "\" y=\"" << num(ly + 1) << "\" font-size=\"12\">"
        << escape(s.label) << "</text>\n";
  }
  svg << "</g>\n";
}

std::vector<double> column(const SweepResult& r, Metric m, bool se) {
  std::vector<double> out;
  for (const SweepRow& row : r.rows) out.push_back(se ? row[m].standard_error : row[m].mean);
  return out;
}

bool has(const SweepResult& r, Metric m) {
  return std::find(r.metrics.begin(), r.metrics.end(), m) != r.metrics.end();
}

PlotSeries metric_series(const SweepResult& r, Metric m, std::string label, std::string color) {
  PlotSeries s;
  s.label = std::move(label);
  s.color = std::move(color);
  for (const SweepRow& row : r.rows) s.x.push_back(row.np_over_m);
  s.y = column(r, m, false);
  s.y_err = column(r, m, true);
  return s;
}

std::string error_label(const SweepResult& r) {
  return r.normalized ? "error / sigma_y^2" : "error";
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
  std::ostringstream svg;
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height)
      << "\" font-family=\"sans-serif\">\n";
  svg << "<defs>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double y0 = kPanelHeight * static_cast<double>(p);
    svg << "<clipPath id=\"clip" << num(y0) << "\"><rect x=\"" << num(kLeft) << "\" y=\""
        << num(y0 + kTop) << "\" width=\"" << num(kWidth - kLeft - kRight) << "\" height=\""
        << num(kPanelHeight - kTop - kBottom) << "\"/></clipPath>\n";
  }
  svg << "</defs>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p)
    render_panel(svg, panels[p], kPanelHeight * static_cast<double>(p));
  svg << "</svg>\n";
  return svg.str();
}

std::string sweep_svg(const SweepResult& result) {
  std::vector<PlotPanel> panels;
  PlotPanel errors{"Train and test error", "N_p / M", error_label(result), true, true, 1.0, {}};
  if (has(result, Metric::test_error))
    errors.series.push_back(metric_series(result, Metric::test_error, "test", "#1f77b4"));
  if (has(result, Metric::train_error))
    errors.series.push_back(metric_series(result, Metric::train_error, "train", "#ff7f0e"));
  if (has(result, Metric::bias_sq))
    errors.series.push_back(metric_series(result, Metric::bias_sq, "bias^2", "#2ca02c"));
  if (has(result, Metric::variance))
    errors.series.push_back(metric_series(result, Metric::variance, "variance", "#d62728"));
  if (!errors.series.empty()) panels.push_back(std::move(errors));

  PlotPanel angles{"Largest singular triple of P_f", "N_p / M", "degrees", true, false, 1.0, {}};
  if (has(result, Metric::theta_max_deg))
    angles.series.push_back(metric_series(result, Metric::theta_max_deg, "theta_max", "#9467bd"));
  if (has(result, Metric::delta_phi_max_deg))
    angles.series.push_back(
        metric_series(result, Metric::delta_phi_max_deg, "delta_phi_max", "#8c564b"));
  if (!angles.series.empty()) panels.push_back(std::move(angles));
  return render_svg(panels);
}

std::string bias_variance_svg(const SweepResult& result) {
  PlotPanel p{"Geometric bias and variance", "N_p / M", error_label(result), true, true, 1.0, {}};
  p.series.push_back(metric_series(result, Metric::test_error, "test error", "#1f77b4"));
  p.series.push_back(metric_series(result, Metric::geom_error, "geometric error", "#7f7f7f"));
  p.series.push_back(metric_series(result, Metric::bias_sq, "bias^2", "#2ca02c"));
  p.series.push_back(metric_series(result, Metric::variance, "variance", "#d62728"));
  return render_svg({p});
}

std::string perturbation_svg(const PerturbationResult& result) {
  PlotPanel p{"Directional derivatives", "d y_true", "d y_pred", false, false, std::nullopt, {}};
  PlotSeries adv{"adversarial", "#1f77b4", {}, {}, {}, false, result.summary.adversarial};
  PlotSeries inv{"invariant", "#d62728", {}, {}, {}, false, result.summary.invariant};
  for (const PerturbationRecord& r : result.records) {
    PlotSeries& s = r.kind == PerturbationKind::adversarial ? adv : inv;
    s.x.push_back(r.d_y_true);
    s.y.push_back(r.d_y_pred);
  }
  p.series = {adv, inv};
  return render_svg({p});
}

}  // namespace georeg
