#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ccrm/report.hpp"

namespace ccrm::report {

namespace {

// Fixed-point coordinates keep the output identical across platforms.
std::string num(double v) {
  auto s = fmt::format("{:.2f}", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

struct Rgb {
  double r, g, b;
};

Rgb lerp(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

std::string hex(Rgb c) {
  auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0))); };
  return fmt::format("#{:02x}{:02x}{:02x}", channel(c.r), channel(c.g), channel(c.b));
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlue{8, 48, 107};
constexpr Rgb kRed{165, 15, 21};

std::string ramp_color(Ramp ramp, double v, double lo, double hi) {
  if (ramp == Ramp::Sequential) {
    const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    return hex(lerp(kWhite, kBlue, t));
  }
  // Diverging: white at 0, red below, blue above.
  if (v >= 0) return hex(lerp(kWhite, kBlue, hi > 0 ? std::clamp(v / hi, 0.0, 1.0) : 0.0));
  return hex(lerp(kWhite, kRed, lo < 0 ? std::clamp(v / lo, 0.0, 1.0) : 0.0));
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string header(double width, double height) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      num(width), num(height));
}

struct Axis {
  double lo, hi;
};

// Pads a degenerate range so scaling never divides by zero.
Axis padded(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.1;
  return {lo - pad, hi + pad};
}

struct Plot {
  double left = 60, top = 40, width = 480, height = 300;
  Axis x, y;

  double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
  double py(double v) const { return top + height - (v - y.lo) / (y.hi - y.lo) * height; }

  std::string frame(const std::string& title, const std::string& x_label, const std::string& y_label) const {
    std::string out;
    out += fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                       num(left + width / 2), xml_escape(title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\"/>\n",
                       num(left), num(top), num(width), num(height));
    for (int i = 0; i <= 4; ++i) {
      const double yv = y.lo + (y.hi - y.lo) * i / 4.0;
      const double yy = py(yv);
      out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n", num(left), num(yy),
                         num(left + width), num(yy));
      out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(left - 4), num(yy + 4),
                         fmt::format("{:.3g}", yv));
      const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
      out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(px(xv)),
                         num(top + height + 14), fmt::format("{:.3g}", xv));
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(left + width / 2),
                       num(top + height + 32), xml_escape(x_label));
    out += fmt::format("<text x=\"14\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0})\">{1}</text>\n",
                       num(top + height / 2), xml_escape(y_label));
    return out;
  }
};

std::string legend_entry(double x, double y, const char* color, const std::string& name) {
  return fmt::format(
      "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n"
      "<text x=\"{}\" y=\"{}\">{}</text>\n",
      num(x), num(y), num(x + 18), num(y), color, num(x + 24), num(y + 4), xml_escape(name));
}

}  // namespace

std::string render_heatmap(const LabeledMatrix& matrix, const HeatmapOptions& options) {
  const auto m = matrix.sorted();
  double lo = 0, hi = 0;
  bool any = false;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (const auto& v = m.at(r, c)) {
        lo = any ? std::min(lo, *v) : *v;
        hi = any ? std::max(hi, *v) : *v;
        any = true;
      }
  if (options.ramp == Ramp::Diverging) {
    const double a = std::max(std::abs(lo), std::abs(hi));
    lo = -a;
    hi = a;
  }
  if (options.min) lo = *options.min;
  if (options.max) hi = *options.max;

  std::size_t longest_row = 0, longest_col = 0;
  for (const auto& l : m.row_labels()) longest_row = std::max(longest_row, l.size());
  for (const auto& l : m.col_labels()) longest_col = std::max(longest_col, l.size());
  const double cs = options.cell_size;
  const double left = 12 + 7.0 * static_cast<double>(longest_row);
  const double top = 40 + 7.0 * static_cast<double>(longest_col);
  const double width = left + cs * static_cast<double>(m.cols()) + 20;
  const double height = top + cs * static_cast<double>(m.rows()) + 40;

  std::string out = header(width, height);
  out += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"13\">{}</text>\n", num(12), xml_escape(options.title));
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double x = left + cs * (static_cast<double>(c) + 0.5);
    out += fmt::format("<text x=\"{0}\" y=\"{1}\" transform=\"rotate(-90 {0} {1})\">{2}</text>\n", num(x + 4),
                       num(top - 4), xml_escape(m.col_labels()[c]));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double y = top + cs * static_cast<double>(r);
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(left - 4), num(y + cs / 2 + 4),
                       xml_escape(m.row_labels()[r]));
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = left + cs * static_cast<double>(c);
      const auto& v = m.at(r, c);
      const auto fill = v ? ramp_color(options.ramp, *v, lo, hi) : std::string("#ffffff");
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#cccccc\"/>\n",
                         num(x), num(y), num(cs), num(cs), fill);
      if (!v) {
        const double p = cs * 0.25;
        out += fmt::format(
            "<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"#888888\" stroke-width=\"1.5\"/>\n", num(x + p), num(y + p),
            num(x + cs - p), num(y + cs - p), num(x + cs - p), num(y + p), num(x + p), num(y + cs - p));
      } else if (options.self_cells.count({m.row_labels()[r], m.col_labels()[c]})) {
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#e6550d\"/>\n", num(x + cs / 2), num(y + cs / 2),
                           num(cs * 0.18));
      }
    }
  }
  // Color scale.
  const double sy = top + cs * static_cast<double>(m.rows()) + 14;
  const double sw = std::max(60.0, std::min(160.0, cs * static_cast<double>(m.cols())));
  for (int i = 0; i < 10; ++i) {
    const double v = lo + (hi - lo) * (i + 0.5) / 10.0;
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"8\" fill=\"{}\"/>\n", num(left + sw * i / 10.0),
                       num(sy), num(sw / 10.0), ramp_color(options.ramp, v, lo, hi));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(left - 4), num(sy + 8),
                     fmt::format("{:.3g}", lo));
  out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(left + sw + 4), num(sy + 8), fmt::format("{:.3g}", hi));
  out += "</svg>\n";
  return out;
}

std::string render_ranked_curves(const std::map<std::string, std::vector<double>>& series, const std::string& title,
                                 const std::string& y_label) {
  struct Entry {
    std::string name;
    std::vector<double> values;
    double peak;
  };
  std::vector<Entry> entries;
  std::size_t longest = 0;
  double lo = 0, hi = 0;
  for (const auto& [name, values] : series) {
    if (values.empty()) continue;
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (entries.empty()) lo = hi = sorted.front();
    lo = std::min(lo, sorted.back());
    hi = std::max(hi, sorted.front());
    longest = std::max(longest, sorted.size());
    entries.push_back({name, std::move(sorted), 0});
    entries.back().peak = entries.back().values.front();
  }
  if (entries.empty()) throw Error("ranked curves: no series has any value");
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.peak > b.peak; });

  Plot plot;
  plot.x = padded(1, static_cast<double>(longest));
  plot.y = padded(std::min(0.0, lo), std::max(hi, lo > 0 ? hi : 0.0));
  const double legend_x = plot.left + plot.width + 16;
  const double height = std::max(plot.top + plot.height + 44, plot.top + 16.0 * static_cast<double>(entries.size()) + 20);
  std::string out = header(legend_x + 140, height);
  out += plot.frame(title, "rank of language pair", y_label);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const auto& e = entries[i];
    if (e.values.size() == 1) {
      out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n", num(plot.px(1)), num(plot.py(e.values[0])),
                         color);
    } else {
      std::string points;
      for (std::size_t k = 0; k < e.values.size(); ++k) {
        if (k) points += ' ';
        points += num(plot.px(static_cast<double>(k + 1))) + "," + num(plot.py(e.values[k]));
      }
      out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points, color);
    }
    out += legend_entry(legend_x, plot.top + 16.0 * static_cast<double>(i) + 6, color, e.name);
  }
  out += "</svg>\n";
  return out;
}

std::string render_line_chart(const std::vector<LineSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label) {
  bool any = false;
  double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!y) continue;
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = *y;
        any = true;
      }
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, *y);
      yhi = std::max(yhi, *y);
    }
  Plot plot;
  plot.x = padded(xlo, xhi);
  plot.y = padded(std::min(0.0, ylo), yhi);
  const double legend_x = plot.left + plot.width + 16;
  std::string out = header(legend_x + 140, plot.top + plot.height + 44);
  out += plot.frame(title, x_label, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::vector<std::string> runs(1);
    for (const auto& [x, y] : series[i].points) {
      if (!y) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      const auto pt = num(plot.px(x)) + "," + num(plot.py(*y));
      if (!runs.back().empty()) runs.back() += ' ';
      runs.back() += pt;
      out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n", num(plot.px(x)), num(plot.py(*y)),
                         color);
    }
    for (const auto& r : runs)
      if (r.find(' ') != std::string::npos)
        out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", r, color);
    out += legend_entry(legend_x, plot.top + 16.0 * static_cast<double>(i) + 6, color, series[i].name);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ccrm::report
