#include "iadb/svg.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iadb {

namespace {

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgFigure::SvgFigure(int panels_x, int panels_y, int panel_width, int panel_height)
    : panels_x_(panels_x), panels_y_(panels_y), pw_(panel_width), ph_(panel_height),
      panels_(static_cast<std::size_t>(panels_x) * panels_y) {
  if (panels_x < 1 || panels_y < 1) throw std::invalid_argument("SvgFigure: bad panel grid");
}

SvgFigure::Panel& SvgFigure::panel(int px, int py) {
  if (px < 0 || px >= panels_x_ || py < 0 || py >= panels_y_)
    throw std::out_of_range("SvgFigure: panel index out of range");
  return panels_[static_cast<std::size_t>(py) * panels_x_ + px];
}

const SvgFigure::Panel& SvgFigure::panel(int px, int py) const {
  return const_cast<SvgFigure*>(this)->panel(px, py);
}

double SvgFigure::map_x(const Panel& p, int px, double x) const {
  const double frac = (x - p.x_min) / (p.x_max - p.x_min);
  return margin_ + px * (pw_ + margin_) + frac * pw_;
}

double SvgFigure::map_y(const Panel& p, int py, double y) const {
  const double frac = (y - p.y_min) / (p.y_max - p.y_min);
  return margin_ + py * (ph_ + margin_) + (1.0 - frac) * ph_;
}

void SvgFigure::set_panel(int px, int py, double x_min, double x_max, double y_min, double y_max,
                          const std::string& title) {
  if (!(x_max > x_min) || !(y_max > y_min))
    throw std::invalid_argument("SvgFigure: degenerate panel window");
  Panel& p = panel(px, py);
  p.x_min = x_min;
  p.x_max = x_max;
  p.y_min = y_min;
  p.y_max = y_max;
  p.title = title;
  p.configured = true;

  const double x0 = margin_ + px * (pw_ + margin_);
  const double y0 = margin_ + py * (ph_ + margin_);
  body_.push_back("<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(pw_) +
                  "\" height=\"" + num(ph_) + "\" fill=\"white\" stroke=\"#888\"/>");
  if (!title.empty())
    body_.push_back("<text x=\"" + num(x0 + 4) + "\" y=\"" + num(y0 - 6) +
                    "\" font-size=\"12\" font-family=\"monospace\">" + escape_xml(title) +
                    "</text>");
}

void SvgFigure::scatter(int px, int py, const std::vector<Vec>& pts, const std::string& color,
                        double radius) {
  const Panel& p = panel(px, py);
  for (const auto& pt : pts) {
    const double y = pt.size() > 1 ? pt[1] : 0.0;
    body_.push_back("<circle cx=\"" + num(map_x(p, px, pt[0])) + "\" cy=\"" +
                    num(map_y(p, py, y)) + "\" r=\"" + num(radius) + "\" fill=\"" + color +
                    "\"/>");
  }
}

void SvgFigure::scatter_labeled(int px, int py, const std::vector<Vec>& pts,
                                const std::vector<int>& labels,
                                const std::vector<std::string>& palette, double radius) {
  if (labels.size() != pts.size())
    throw std::invalid_argument("SvgFigure::scatter_labeled: label count mismatch");
  const Panel& p = panel(px, py);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string& color = palette[static_cast<std::size_t>(labels[i]) % palette.size()];
    const double y = pts[i].size() > 1 ? pts[i][1] : 0.0;
    body_.push_back("<circle cx=\"" + num(map_x(p, px, pts[i][0])) + "\" cy=\"" +
                    num(map_y(p, py, y)) + "\" r=\"" + num(radius) + "\" fill=\"" + color +
                    "\"/>");
  }
}

void SvgFigure::polyline(int px, int py, const std::vector<Vec>& pts, const std::string& color,
                         double width, double opacity) {
  if (pts.size() < 2) return;
  const Panel& p = panel(px, py);
  std::string points;
  for (const auto& pt : pts) {
    const double y = pt.size() > 1 ? pt[1] : 0.0;
    points += num(map_x(p, px, pt[0])) + "," + num(map_y(p, py, y)) + " ";
  }
  body_.push_back("<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
                  "\" stroke-width=\"" + num(width) + "\" stroke-opacity=\"" + num(opacity) +
                  "\"/>");
}

void SvgFigure::bars(int px, int py, double lo, double hi, const std::vector<double>& heights,
                     const std::string& color) {
  if (heights.empty()) return;
  const Panel& p = panel(px, py);
  const double bw = (hi - lo) / static_cast<double>(heights.size());
  for (std::size_t b = 0; b < heights.size(); ++b) {
    const double x0 = map_x(p, px, lo + b * bw);
    const double x1 = map_x(p, px, lo + (b + 1) * bw);
    const double y1 = map_y(p, py, 0.0);
    const double y0 = map_y(p, py, heights[b]);
    if (!(y1 > y0)) continue;
    body_.push_back("<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" +
                    num(x1 - x0) + "\" height=\"" + num(y1 - y0) + "\" fill=\"" + color + "\"/>");
  }
}

void SvgFigure::save(const std::filesystem::path& path) const {
  const int W = margin_ + panels_x_ * (pw_ + margin_);
  const int H = margin_ + panels_y_ * (ph_ + margin_);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("SvgFigure::save: cannot open " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  for (const auto& el : body_) out << el << "\n";
  out << "</svg>\n";
}

}  // namespace iadb
