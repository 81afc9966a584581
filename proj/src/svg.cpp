#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sculptor {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-14 ? 0.0 : v);
  return buf;
}

}  // namespace

std::string xml_escape(const std::string& s) {
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

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label)
  : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgChart::set_x_range(double lo, double hi) {
  x0_ = lo;
  x1_ = hi;
  fixed_x_ = true;
}

void SvgChart::set_y_range(double lo, double hi) {
  y0_ = lo;
  y1_ = hi;
  fixed_y_ = true;
}

void SvgChart::add_line(const std::vector<std::pair<double, double>>& pts, const std::string& color, bool dashed,
                        const std::string& legend) {
  lines_.push_back({pts, color, dashed, legend});
}

void SvgChart::add_error_bar(double x, double y, double e, const std::string& color) {
  bars_.push_back({x, y, e, color});
}

void SvgChart::add_hline(double y, const std::string& color) {
  hlines_.push_back(y);
  hline_colors_.push_back(color);
}

void SvgChart::fit_ranges() {
  double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
  auto take = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    xl = std::min(xl, x);
    xh = std::max(xh, x);
    yl = std::min(yl, y);
    yh = std::max(yh, y);
  };
  for (const auto& l : lines_)
    for (const auto& [x, y] : l.pts) take(x, y);
  for (const auto& b : bars_) {
    take(b.x, b.y - b.e);
    take(b.x, b.y + b.e);
  }
  for (double y : hlines_) take(std::isfinite(xl) ? xl : 0.0, y);
  if (!std::isfinite(xl)) xl = 0, xh = 1, yl = 0, yh = 1;
  if (xh - xl <= 0) xl -= 0.5, xh += 0.5;
  if (yh - yl <= 0) {
    const double pad = std::max(1e-12, std::abs(yl) * 0.1);
    yl -= pad, yh += pad;
  }
  const double ypad = 0.05 * (yh - yl);
  if (!fixed_x_) x0_ = xl, x1_ = xh;
  if (!fixed_y_) y0_ = yl - ypad, y1_ = yh + ypad;
}

double SvgChart::px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
double SvgChart::py(double y) const { return kHeight - kBottom - (y - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

std::string SvgChart::render() const {
  SvgChart c = *this;
  c.fit_ranges();
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(c.title_)
     << "</text>\n";

  // Axes and ticks.
  const double xa = c.px(c.x0_), xb = c.px(c.x1_), ya = c.py(c.y0_), yb = c.py(c.y1_);
  os << "<path d=\"M" << num(xa) << ' ' << num(yb) << " L" << num(xa) << ' ' << num(ya) << " L" << num(xb) << ' '
     << num(ya) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = c.x0_ + (c.x1_ - c.x0_) * i / 5.0;
    const double yv = c.y0_ + (c.y1_ - c.y0_) * i / 5.0;
    os << "<text x=\"" << num(c.px(xv)) << "\" y=\"" << num(ya + 18) << "\" text-anchor=\"middle\">"
       << tick_label(xv) << "</text>\n";
    os << "<text x=\"" << num(xa - 6) << "\" y=\"" << num(c.py(yv) + 4) << "\" text-anchor=\"end\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << num((xa + xb) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
     << xml_escape(c.x_label_) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num((ya + yb) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num((ya + yb) / 2) << ")\">" << xml_escape(c.y_label_) << "</text>\n";

  for (std::size_t i = 0; i < c.hlines_.size(); ++i)
    os << "<path d=\"M" << num(xa) << ' ' << num(c.py(c.hlines_[i])) << " L" << num(xb) << ' '
       << num(c.py(c.hlines_[i])) << "\" stroke=\"" << c.hline_colors_[i] << "\" stroke-width=\"0.8\"/>\n";

  for (const auto& l : c.lines_) {
    os << "<polyline fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\"";
    if (l.dashed) os << " stroke-dasharray=\"5,4\"";
    os << " points=\"";
    bool first = true;
    for (const auto& [x, y] : l.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      os << (first ? "" : " ") << num(c.px(x)) << ',' << num(c.py(y));
      first = false;
    }
    os << "\"/>\n";
  }
  for (const auto& b : c.bars_)
    os << "<path d=\"M" << num(c.px(b.x)) << ' ' << num(c.py(b.y - b.e)) << " L" << num(c.px(b.x)) << ' '
       << num(c.py(b.y + b.e)) << "\" stroke=\"" << b.color << "\"/>\n";

  double ly = kTop + 6;
  for (const auto& l : c.lines_) {
    if (l.legend.empty()) continue;
    os << "<text x=\"" << num(xb - 4) << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" fill=\"" << l.color << "\">"
       << xml_escape(l.legend) << "</text>\n";
    ly += 15;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sculptor
