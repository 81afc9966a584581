#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sculptor {

/// Minimal self-contained SVG line chart.
class SvgChart {
public:
  SvgChart(std::string title, std::string x_label, std::string y_label);

  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  /// Adds a data series drawn as one <polyline>.
  void add_line(const std::vector<std::pair<double, double>>& pts, const std::string& color, bool dashed,
                const std::string& legend = {});

  /// Vertical error bar at x spanning [y - e, y + e].
  void add_error_bar(double x, double y, double e, const std::string& color);

  /// Horizontal reference line.
  void add_hline(double y, const std::string& color);

  std::string render() const;

private:
  struct Line {
    std::vector<std::pair<double, double>> pts;
    std::string color;
    bool dashed;
    std::string legend;
  };
  struct Bar {
    double x, y, e;
    std::string color;
  };

  double px(double x) const;
  double py(double y) const;
  void fit_ranges();

  std::string title_, x_label_, y_label_;
  bool fixed_x_ = false, fixed_y_ = false;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  std::vector<Line> lines_;
  std::vector<Bar> bars_;
  std::vector<double> hlines_;
  std::vector<std::string> hline_colors_;
};

/// Escapes &, <, >, " for XML text and attributes.
std::string xml_escape(const std::string& s);

}  // namespace sculptor
