#include "dppbound/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dppbound {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

// Round step of 1, 2 or 5 times a power of ten giving about n ticks.
std::vector<double> ticks(double lo, double hi, int n) {
  const double raw = (hi - lo) / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, double width, double height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)), width_(width), height_(height) {}

void SvgPlot::set_x_range(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("SvgPlot: empty x range");
  fixed_x_ = true;
  x_lo_ = lo;
  x_hi_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("SvgPlot: empty y range");
  fixed_y_ = true;
  y_lo_ = lo;
  y_hi_ = hi;
}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
                   const std::string& label, double stroke, bool dashed) {
  if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: x and y differ in length");
  series_.push_back({Kind::Line, x, y, color, label, stroke, dashed});
}

void SvgPlot::points(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
                     const std::string& label, double radius, bool hollow) {
  if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: x and y differ in length");
  series_.push_back({Kind::Points, x, y, color, label, radius, hollow});
}

void SvgPlot::bars(const std::vector<double>& edges, const std::vector<double>& heights, const std::string& color,
                   const std::string& label) {
  if (edges.size() != heights.size() + 1) throw std::invalid_argument("SvgPlot: need one more edge than bars");
  series_.push_back({Kind::Bars, edges, heights, color, label, 0.0, false});
}

std::string SvgPlot::render() const {
  double xl = x_lo_, xh = x_hi_, yl = y_lo_, yh = y_hi_;
  if (!fixed_x_ || !fixed_y_) {
    double ax = std::numeric_limits<double>::infinity(), bx = -ax, ay = ax, by = -ax;
    for (const auto& s : series_) {
      for (const double v : s.x)
        if (std::isfinite(v)) ax = std::min(ax, v), bx = std::max(bx, v);
      for (const double v : s.y)
        if (std::isfinite(v)) ay = std::min(ay, v), by = std::max(by, v);
      if (s.kind == Kind::Bars) ay = std::min(ay, 0.0);
    }
    if (!std::isfinite(ax)) ax = 0, bx = 1, ay = 0, by = 1;
    if (bx <= ax) ax -= 0.5, bx += 0.5;
    if (by <= ay) ay -= 0.5, by += 0.5;
    if (!fixed_x_) xl = ax - 0.05 * (bx - ax), xh = bx + 0.05 * (bx - ax);
    if (!fixed_y_) yl = ay - 0.05 * (by - ay), yh = by + 0.05 * (by - ay);
  }
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = width_ - left - right, ph = height_ - top - bottom;
  auto sx = [&](double v) { return left + (v - xl) / (xh - xl) * pw; };
  auto sy = [&](double v) { return top + (yh - v) / (yh - yl) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
     << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width_ / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_)
     << "</text>\n";
  os << "<defs><clipPath id=\"panel\"><rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";
  for (const double t : ticks(xl, xh, 6)) {
    os << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
       << num(top + ph + 5) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(t)
       << "</text>\n";
  }
  for (const double t : ticks(yl, yh, 5)) {
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(sy(t)) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
       << "</text>\n";
  }
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height_ - 12) << "\" text-anchor=\"middle\">"
     << escape(x_label_) << "</text>\n";
  os << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y_label_) << "</text>\n";

  os << "<g clip-path=\"url(#panel)\">\n";
  for (const auto& s : series_) {
    switch (s.kind) {
      case Kind::Line: {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << num(s.size) << '"';
        if (s.flag) os << " stroke-dasharray=\"6,4\"";
        os << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
        os << "\"/>\n";
        break;
      }
      case Kind::Points:
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
          os << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\"" << num(s.size) << '"';
          if (s.flag) os << " fill=\"none\" stroke=\"" << s.color << "\"/>\n";
          else os << " fill=\"" << s.color << "\"/>\n";
        }
        break;
      case Kind::Bars:
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
          const double y0 = sy(std::max(0.0, yl)), y1 = sy(s.y[i]);
          os << "<rect x=\"" << num(sx(s.x[i])) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
             << num(sx(s.x[i + 1]) - sx(s.x[i])) << "\" height=\"" << num(std::abs(y0 - y1)) << "\" fill=\"" << s.color
             << "\" fill-opacity=\"0.6\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
        }
        break;
    }
  }
  os << "</g>\n";

  double ly = top + 14;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    const double lx = left + pw - 150;
    if (s.kind == Kind::Line)
      os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 20) << "\" y2=\""
         << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
    else
      os << "<rect x=\"" << num(lx + 5) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\"" << s.color
         << "\"/>";
    os << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<double> histogram_density(const std::vector<double>& values, const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram_density: need at least two edges");
  std::vector<double> counts(edges.size() - 1, 0.0);
  const double lo = edges.front(), hi = edges.back();
  const double width = (hi - lo) / static_cast<double>(counts.size());
  std::size_t used = 0;
  for (const double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    const auto k = std::min(counts.size() - 1, static_cast<std::size_t>((v - lo) / width));
    counts[k] += 1.0;
    ++used;
  }
  if (used > 0)
    for (auto& c : counts) c /= static_cast<double>(values.size()) * width;
  return counts;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace dppbound
