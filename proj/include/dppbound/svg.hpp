#pragma once

#include <string>
#include <vector>

namespace dppbound {

/// Minimal static SVG chart: one panel with linear axes, ticks and a legend.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label, double width = 640, double height = 420);

  /// Fixes an axis range; otherwise ranges are taken from the data with 5% padding.
  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
            const std::string& label = "", double stroke = 1.5, bool dashed = false);
  void points(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
              const std::string& label = "", double radius = 2.5, bool hollow = false);
  /// Bars over consecutive bin edges (edges.size() == heights.size() + 1).
  void bars(const std::vector<double>& edges, const std::vector<double>& heights, const std::string& color,
            const std::string& label = "");

  std::string render() const;

 private:
  enum class Kind { Line, Points, Bars };
  struct Series {
    Kind kind;
    std::vector<double> x, y;
    std::string color, label;
    double size;
    bool flag;
  };
  std::string title_, x_label_, y_label_;
  double width_, height_;
  bool fixed_x_ = false, fixed_y_ = false;
  double x_lo_ = 0, x_hi_ = 1, y_lo_ = 0, y_hi_ = 1;
  std::vector<Series> series_;
};

/// Equal-width histogram counts normalized to a density.
std::vector<double> histogram_density(const std::vector<double>& values, const std::vector<double>& edges);
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace dppbound
