#include "corextm/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace corextm::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// Sequential white -> dark blue ramp.
std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(247 - v * (247 - 8)));
  const int g = static_cast<int>(std::lround(251 - v * (251 - 48)));
  const int b = static_cast<int>(std::lround(255 - v * (255 - 107)));
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

double nice_ceiling(double v) {
  if (v <= 0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_line_chart(const LineChart& chart, int width, int height) {
  const double left = 70, right = 180, top = 40, bottom = 70;
  const double pw = width - left - right, ph = height - top - bottom;
  double ymax = 0;
  for (const auto& s : chart.series) {
    for (double v : s.values) ymax = std::max(ymax, v);
  }
  ymax = nice_ceiling(ymax);
  const size_t n = chart.x_ticks.size();
  auto x_at = [&](double i) { return left + (n > 1 ? pw * i / static_cast<double>(n - 1) : pw / 2); };
  auto y_at = [&](double v) { return top + ph * (1.0 - v / ymax); };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  s += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                   left + pw / 2, escape(chart.title));

  for (int k = 0; k <= 4; ++k) {
    const double v = ymax * k / 4.0;
    const double y = y_at(v);
    s += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#e0e0e0\"/>\n",
                     left, y, left + pw, y);
    s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6,
                     y + 4, v);
  }
  s += fmt::format("<text transform=\"translate(16,{:.2f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                   top + ph / 2, escape(chart.y_label));

  const size_t every = std::max<size_t>(1, n / 12);
  for (size_t i = 0; i < n; i += every) {
    const double x = x_at(static_cast<double>(i));
    s += fmt::format(
        "<text transform=\"translate({:.2f},{:.2f}) rotate(45)\">{}</text>\n", x,
        top + ph + 14, escape(chart.x_ticks[i]));
  }
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left,
                   top, top + ph);
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left,
                   top + ph, left + pw);

  for (const auto& [pos, label] : chart.markers) {
    const double x = x_at(pos);
    s += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#777\" "
        "stroke-dasharray=\"4,3\"/>\n",
        x, top, top + ph);
    s += fmt::format(
        "<text transform=\"translate({:.2f},{}) rotate(-90)\" text-anchor=\"end\" fill=\"#555\" "
        "font-size=\"9\">{}</text>\n",
        x + 3, top + 4, escape(label));
  }

  for (size_t k = 0; k < chart.series.size(); ++k) {
    const auto& series = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (size_t i = 0; i < series.values.size(); ++i) {
      points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", x_at(static_cast<double>(i)),
                            y_at(series.values[i]));
    }
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                     color, points);
    const double ly = top + 12 + 18.0 * static_cast<double>(k);
    s += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n",
                     left + pw + 16, ly - 4, color);
    s += fmt::format("<text x=\"{}\" y=\"{:.2f}\">{}</text>\n", left + pw + 36, ly,
                     escape(series.name));
  }
  s += "</svg>\n";
  return s;
}

std::string render_heatmap(const SimilarityMatrix& matrix, const std::string& title,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels, int cell) {
  const int left = 110, top = 110, legend = 70;
  const int width = left + cell * static_cast<int>(matrix.cols) + legend + 20;
  const int height = top + cell * static_cast<int>(matrix.rows) + 40;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"10\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  s += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                   width / 2, escape(title));
  for (size_t r = 0; r < matrix.rows; ++r) {
    const int y = top + static_cast<int>(r) * cell;
    const std::string label = r < row_labels.size() ? row_labels[r] : std::to_string(r);
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6,
                     y + cell / 2 + 4, escape(label));
    for (size_t c = 0; c < matrix.cols; ++c) {
      const int x = left + static_cast<int>(c) * cell;
      const double v = matrix.at(r, c);
      const std::string fill = matrix.is_undefined(r, c) ? "#dddddd" : heat_color(v);
      s += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"white\">"
          "<title>official {} / public {}: {:.3f}</title></rect>\n",
          x, y, cell, cell, fill, r, c, v);
    }
  }
  for (size_t c = 0; c < matrix.cols; ++c) {
    const int x = left + static_cast<int>(c) * cell + cell / 2;
    const std::string label = c < col_labels.size() ? col_labels[c] : std::to_string(c);
    s += fmt::format("<text transform=\"translate({},{}) rotate(-60)\">{}</text>\n", x + 3,
                     top - 6, escape(label));
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">public topics</text>\n",
                   left + cell * static_cast<int>(matrix.cols) / 2, height - 12);
  s += fmt::format("<text transform=\"translate(14,{}) rotate(-90)\" text-anchor=\"middle\">official topics</text>\n",
                   top + cell * static_cast<int>(matrix.rows) / 2);

  const int lx = left + cell * static_cast<int>(matrix.cols) + 20;
  const int lh = cell * static_cast<int>(matrix.rows);
  for (int k = 0; k < 20; ++k) {
    const double v = 1.0 - k / 19.0;
    s += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"14\" height=\"{:.2f}\" fill=\"{}\"/>\n", lx,
                     top + lh * k / 20.0, lh / 20.0 + 0.5, heat_color(v));
  }
  s += fmt::format("<text x=\"{}\" y=\"{}\">1.0</text>\n", lx + 18, top + 8);
  s += fmt::format("<text x=\"{}\" y=\"{}\">0.0</text>\n", lx + 18, top + lh);
  s += "</svg>\n";
  return s;
}

LineChart timeline_chart(const TimelineSeries& official, const TimelineSeries& public_series,
                         const std::vector<EventMarker>& events, bool normalized,
                         const std::string& topic_name) {
  LineChart chart;
  chart.title = fmt::format("Topic {}: official vs public", topic_name);
  chart.y_label = normalized ? "share of weekly posts" : "posts per week";
  for (const auto& [week, n] : official.buckets) chart.x_ticks.push_back(format_date(week));
  auto values = [&](const TimelineSeries& s) {
    std::vector<double> v;
    for (size_t i = 0; i < s.buckets.size(); ++i) {
      v.push_back(normalized ? s.normalized[i] : static_cast<double>(s.buckets[i].second));
    }
    return v;
  };
  chart.series.push_back({"official", values(official)});
  chart.series.push_back({"public", values(public_series)});
  if (!official.buckets.empty()) {
    const Date first = official.buckets.front().first;
    for (const auto& e : events) {
      const double pos = static_cast<double>((e.date - first).count()) / 7.0;
      chart.markers.emplace_back(pos, fmt::format("{} {}", format_date(e.date), e.label));
    }
  }
  return chart;
}

}  // namespace corextm::svg
