#ifndef COREXTM_SVG_HPP_
#define COREXTM_SVG_HPP_

#include <string>
#include <vector>

#include "corextm/analytics.hpp"

namespace corextm::svg {

struct LineSeries {
  std::string name;
  std::vector<double> values;  // one per x tick
};

struct LineChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> x_ticks;
  std::vector<LineSeries> series;
  // Fractional x positions (0 = first tick) with their labels.
  std::vector<std::pair<double, std::string>> markers;
};

// Self-contained SVG documents; no external fonts, scripts or images.
std::string render_line_chart(const LineChart& chart, int width = 900, int height = 420);

std::string render_heatmap(const SimilarityMatrix& matrix, const std::string& title,
                           const std::vector<std::string>& row_labels,
                           const std::vector<std::string>& col_labels, int cell = 28);

// Official vs public series for one topic, events placed on the week axis.
LineChart timeline_chart(const TimelineSeries& official, const TimelineSeries& public_series,
                         const std::vector<EventMarker>& events, bool normalized,
                         const std::string& topic_name);

std::string escape(const std::string& text);

}  // namespace corextm::svg

#endif  // COREXTM_SVG_HPP_
