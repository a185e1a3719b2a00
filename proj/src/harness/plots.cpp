#include "riemannopt/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "riemannopt/error.hpp"
#include "riemannopt/harness/io.hpp"

namespace riemannopt::harness {

namespace fs = std::filesystem;

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#ff7f0e", "#9467bd", "#8c564b"};

struct Point {
  double x;
  double y;
};

// Minimal fixed-size chart: one plot area, linear or log10 axes.
class Chart {
 public:
  Chart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)),
        y_label_(std::move(y_label)) {}

  void set_x_range(double lo, double hi, bool log = false) {
    x_lo_ = lo, x_hi_ = hi, x_log_ = log;
  }
  void set_y_range(double lo, double hi, bool log = false) {
    y_lo_ = lo, y_hi_ = hi, y_log_ = log;
  }

  void line(const std::vector<Point>& pts, const std::string& color, double width,
            const std::string& label = {}, double opacity = 1.0,
            bool markers = false) {
    std::string d;
    for (const auto& p : pts) {
      d += fmt::format("{}{:.2f},{:.2f}", d.empty() ? "" : " ", sx(p.x), sy(p.y));
    }
    body_ += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" "
        "stroke-opacity=\"{}\"/>\n",
        d, color, width, opacity);
    if (markers) {
      for (const auto& p : pts) {
        body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                             sx(p.x), sy(p.y), color);
      }
    }
    if (!label.empty()) legend_.push_back({label, color});
  }

  // Short vertical marks at the given x positions in a band below the plot
  // area; band 0 is nearest the axis.
  void ticks(const std::vector<double>& xs, int band, const std::string& color,
             const std::string& label) {
    const double y0 = kTop + kPlotH + 8 + band * 14;
    for (double x : xs) {
      body_ += fmt::format(
          "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
          "stroke=\"{3}\" stroke-width=\"1.5\"/>\n",
          sx(x), y0, y0 + 10, color);
    }
    body_ += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" fill=\"{}\">{}</text>\n",
        kLeft + kPlotW + 6, y0 + 9, color, escape(label));
  }

  std::string render() const {
    std::string svg = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight, kWidth, kHeight);
    svg += fmt::format(
        "<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        kLeft + kPlotW / 2, escape(title_));
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
        "stroke=\"#444\"/>\n",
        kLeft, kTop, kPlotW, kPlotH);
    for (int i = 0; i <= 4; ++i) {
      const double fx = x_at(i / 4.0), fy = y_at(i / 4.0);
      const double px = kLeft + kPlotW * i / 4.0, py = kTop + kPlotH * (1 - i / 4.0);
      svg += fmt::format(
          "<text x=\"{:.2f}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
          px, kTop + kPlotH + 44, fmt::format("{:.3g}", fx));
      svg += fmt::format(
          "<text x=\"{}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
          kLeft - 6, py + 3, fmt::format("{:.3g}", fy));
    }
    svg += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        kLeft + kPlotW / 2, kHeight - 8, escape(x_label_));
    svg += fmt::format(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 16 {})\">{}</text>\n",
        kTop + kPlotH / 2, kTop + kPlotH / 2, escape(y_label_));
    svg += body_;
    for (std::size_t i = 0; i < legend_.size(); ++i) {
      const double y = kTop + 12 + 16 * static_cast<double>(i);
      svg += fmt::format(
          "<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"{}\" "
          "stroke-width=\"2\"/>\n<text x=\"{}\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n",
          kLeft + kPlotW + 10, y, kLeft + kPlotW + 30, y, legend_[i].second,
          kLeft + kPlotW + 34, y + 4, escape(legend_[i].first));
    }
    svg += "</svg>\n";
    return svg;
  }

 private:
  static constexpr double kWidth = 760, kHeight = 460;
  static constexpr double kLeft = 70, kTop = 36, kPlotW = 520, kPlotH = 330;

  static std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

  static double map(double v, double lo, double hi, bool log) {
    if (log) {
      v = std::log10(v), lo = std::log10(lo), hi = std::log10(hi);
    }
    return hi > lo ? (v - lo) / (hi - lo) : 0.5;
  }
  static double unmap(double f, double lo, double hi, bool log) {
    if (log) return std::pow(10.0, std::log10(lo) + f * (std::log10(hi) - std::log10(lo)));
    return lo + f * (hi - lo);
  }
  double sx(double x) const { return kLeft + kPlotW * map(x, x_lo_, x_hi_, x_log_); }
  double sy(double y) const {
    return kTop + kPlotH * (1.0 - map(y, y_lo_, y_hi_, y_log_));
  }
  double x_at(double f) const { return unmap(f, x_lo_, x_hi_, x_log_); }
  double y_at(double f) const { return unmap(f, y_lo_, y_hi_, y_log_); }

  std::string title_, x_label_, y_label_;
  double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
  bool x_log_ = false, y_log_ = false;
  std::string body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

std::vector<Point> sample_profile(const DerivativeProfile& profile) {
  std::vector<Point> pts;
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    pts.push_back({t, profile.at(t)});
  }
  return pts;
}

double padded_top(double max) { return max > 0.0 ? 1.05 * max : 1.0; }

// Positive-only range for a log axis, widened when degenerate.
std::pair<double, double> log_range(const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : values) {
    if (v > 0.0) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (!(hi > 0.0)) return {1e-3, 1.0};
  if (hi / lo < 10.0) {
    const double mid = std::sqrt(lo * hi);
    lo = mid / 10.0, hi = mid * 10.0;
  }
  return {lo / 1.2, hi * 1.2};
}

struct Series {
  std::vector<Point> points;
};

fs::path write_svg(const fs::path& path, const Chart& chart) {
  write_text(path, chart.render());
  return path;
}

}  // namespace

std::vector<fs::path> emit_plots(const ExperimentConfig& config, const Logger& log) {
  const fs::path out = config.output;
  const fs::path results_file = layout::results(out);
  std::vector<CsvRow> rows;
  if (fs::exists(results_file)) rows = parse_csv(read_text(results_file));
  if (rows.size() <= 1) {
    if (log) log(fmt::format("warning: no results in '{}'; no plots written",
                             results_file.string()));
    return {};
  }
  const CsvRow& header = rows.front();
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw IoError(fmt::format("{}: missing column '{}'", results_file.string(), name));
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_method = column("method"), c_kind = column("schedule"),
                    c_k = column("k"), c_err = column("mean_error"),
                    c_nis = column("mean_normalized_insertion");

  std::vector<fs::path> written;
  const fs::path dir = layout::plots_dir(out);

  for (Method method : config.methods) {
    const fs::path profile_file = layout::profile(out, method);
    if (!fs::exists(profile_file)) continue;
    const DerivativeProfile profile = read_profile(profile_file);
    const std::string name = to_string(method);

    const std::size_t k = config.sample_counts.front();
    Chart chart(fmt::format("{}: estimated |g'(t)| and {} sample points", name, k), "t",
                "|g'(t)|");
    chart.set_y_range(0.0, padded_top(profile.max()));
    chart.line(sample_profile(profile), kPalette[0], 2.0, "profile");
    const AlphaSchedule uniform = AlphaSchedule::uniform(k);
    chart.ticks({uniform.points().begin(), uniform.points().end()}, 0, "#777", "uniform");
    const fs::path schedule_file = layout::schedule(out, method, k);
    if (fs::exists(schedule_file)) {
      const AlphaSchedule opt = read_schedule(schedule_file);
      chart.ticks({opt.points().begin(), opt.points().end()}, 1, kPalette[1],
                  "optimized");
    }
    written.push_back(write_svg(dir / fmt::format("profile_{}.svg", name), chart));

    const fs::path examples_file = layout::example_profiles(out, method);
    if (fs::exists(examples_file)) {
      std::map<std::string, std::vector<Point>> per_example;
      double top = profile.max();
      const auto ex_rows = parse_csv(read_text(examples_file));
      for (std::size_t r = 1; r < ex_rows.size(); ++r) {
        if (ex_rows[r].size() != 3) continue;
        const double y = std::stod(ex_rows[r][2]);
        per_example[ex_rows[r][0]].push_back({std::stod(ex_rows[r][1]), y});
        top = std::max(top, y);
      }
      Chart overlay(fmt::format("{}: per-example profiles", name), "t", "|g'(t)|");
      overlay.set_y_range(0.0, padded_top(top));
      for (const auto& [id, pts] : per_example) overlay.line(pts, "#999", 1.0, {}, 0.5);
      overlay.line(sample_profile(profile), kPalette[1], 2.5, "dataset profile");
      written.push_back(write_svg(dir / fmt::format("examples_{}.svg", name), overlay));
    }
  }

  // Metric-vs-k charts, one series per (method, schedule kind).
  auto metric_chart = [&](std::size_t col, const std::string& title,
                          const std::string& y_label, bool log_y,
                          const std::string& file) {
    std::map<std::string, Series> series;
    std::vector<std::string> order;
    std::vector<double> ks, ys;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != header.size()) continue;
      const std::string key = row[c_method] + " " + row[c_kind];
      if (!series.count(key)) order.push_back(key);
      const double k = std::stod(row[c_k]), y = std::stod(row[col]);
      series[key].points.push_back({k, y});
      ks.push_back(k);
      ys.push_back(y);
    }
    Chart chart(title, "samples k", y_label);
    const auto [k_lo, k_hi] = std::minmax_element(ks.begin(), ks.end());
    chart.set_x_range(*k_lo / 1.2, *k_hi * 1.2, true);
    if (log_y) {
      const auto [lo, hi] = log_range(ys);
      chart.set_y_range(lo, hi, true);
      for (auto& [key, s] : series) {
        std::erase_if(s.points, [](const Point& p) { return !(p.y > 0.0); });
      }
    } else {
      const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
      const double pad = *hi > *lo ? 0.05 * (*hi - *lo) : 0.5;
      chart.set_y_range(*lo - pad, *hi + pad);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto pts = series[order[i]].points;
      std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.x < b.x; });
      chart.line(pts, kPalette[i % std::size(kPalette)], 2.0, order[i], 1.0, true);
    }
    written.push_back(write_svg(dir / file, chart));
  };
  metric_chart(c_err, "Completeness error", "mean relative error", true, "error_vs_k.svg");
  metric_chart(c_nis, "Normalized insertion score", "mean normalized insertion", false,
               "insertion_vs_k.svg");

  if (log) log(fmt::format("wrote {} plots to {}", written.size(), dir.string()));
  return written;
}

}  // namespace riemannopt::harness
