#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iadb/vec.hpp"

namespace iadb {

/// Minimal self-contained SVG writer: scatter, polyline and histogram
/// primitives only, no external resources. Data coordinates are mapped into
/// a fixed-size panel grid.
class SvgFigure {
 public:
  SvgFigure(int panels_x, int panels_y, int panel_width = 240, int panel_height = 240);

  /// Declares the data window of a panel (panel indices are zero-based,
  /// column-major position px, py).
  void set_panel(int px, int py, double x_min, double x_max, double y_min, double y_max,
                 const std::string& title = "");

  void scatter(int px, int py, const std::vector<Vec>& pts, const std::string& color,
               double radius = 1.5);
  /// Scatter with a per-point color index into `palette`.
  void scatter_labeled(int px, int py, const std::vector<Vec>& pts,
                       const std::vector<int>& labels, const std::vector<std::string>& palette,
                       double radius = 1.5);
  void polyline(int px, int py, const std::vector<Vec>& pts, const std::string& color,
                double width = 1.0, double opacity = 1.0);
  /// Vertical bars over [lo,hi] with the given (already normalized) heights.
  void bars(int px, int py, double lo, double hi, const std::vector<double>& heights,
            const std::string& color);

  void save(const std::filesystem::path& path) const;

 private:
  struct Panel {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    std::string title;
    bool configured = false;
  };
  Panel& panel(int px, int py);
  const Panel& panel(int px, int py) const;
  double map_x(const Panel& p, int px, double x) const;
  double map_y(const Panel& p, int py, double y) const;

  int panels_x_, panels_y_, pw_, ph_;
  int margin_ = 24;
  std::vector<Panel> panels_;
  std::vector<std::string> body_;
};

}  // namespace iadb
