#include "prefgame/svg.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "prefgame/errors.hpp"

namespace prefgame {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 48.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

struct Point {
  double x;
  double y;
};

// p0 bottom-left, p1 top, p2 bottom-right; SVG y grows downward.
Point project(const Policy& p) {
  double side = kWidth - 2.0 * kMargin;
  double h = side * std::sqrt(3.0) / 2.0;
  double ax = kMargin, ay = kMargin + h;
  double bx = kMargin + side / 2.0, by = kMargin;
  double cx = kMargin + side, cy = kMargin + h;
  return Point{p[0] * ax + p[1] * bx + p[2] * cx,
               p[0] * ay + p[1] * by + p[2] * cy};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

void append_star(std::ostringstream& os, Point c, double r,
                 const std::string& color) {
  os << "  <path id=\"nash-star\" fill=\"" << color << "\" d=\"M";
  for (int i = 0; i < 10; ++i) {
    double rad = (i % 2 == 0) ? r : 0.42 * r;
    double ang = -M_PI / 2.0 + i * M_PI / 5.0;
    os << (i == 0 ? "" : " L") << fmt(c.x + rad * std::cos(ang)) << ' '
       << fmt(c.y + rad * std::sin(ang));
  }
  os << " Z\"/>\n";
}

}  // namespace

std::string render_simplex_svg(const std::vector<PlotSeries>& series,
                               const Policy& nash) {
  if (nash.size() != 3)
    throw StructuralError("render_simplex_svg: only 3-response games");
  for (const auto& s : series) {
    if (s.points.empty())
      throw StructuralError("render_simplex_svg: empty series");
    for (const auto& p : s.points)
      if (p.size() != 3)
        throw StructuralError("render_simplex_svg: only 3-response games");
  }

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\">\n"
     << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  Point a = project(Policy::pure(3, 0));
  Point b = project(Policy::pure(3, 1));
  Point c = project(Policy::pure(3, 2));
  os << "  <polygon points=\"" << fmt(a.x) << ',' << fmt(a.y) << ' ' << fmt(b.x)
     << ',' << fmt(b.y) << ' ' << fmt(c.x) << ',' << fmt(c.y)
     << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1.5\"/>\n";
  os << "  <text x=\"" << fmt(a.x - 14) << "\" y=\"" << fmt(a.y + 18)
     << "\" font-size=\"14\">y_a</text>\n"
     << "  <text x=\"" << fmt(b.x - 10) << "\" y=\"" << fmt(b.y - 8)
     << "\" font-size=\"14\">y_b</text>\n"
     << "  <text x=\"" << fmt(c.x + 4) << "\" y=\"" << fmt(c.y + 18)
     << "\" font-size=\"14\">y_c</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    os << "  <polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < series[i].points.size(); ++k) {
      Point p = project(series[i].points[k]);
      os << (k ? " " : "") << fmt(p.x) << ',' << fmt(p.y);
    }
    os << "\"/>\n";
    Point start = project(series[i].points.front());
    os << "  <circle cx=\"" << fmt(start.x) << "\" cy=\"" << fmt(start.y)
       << "\" r=\"4\" fill=\"#1f4fd8\"/>\n";
    os << "  <text x=\"" << fmt(kWidth - kMargin - 150)
       << "\" y=\"" << fmt(kMargin + 18.0 * static_cast<double>(i))
       << "\" font-size=\"13\" fill=\"" << color << "\">" << series[i].label
       << "</text>\n";
  }

  append_star(os, project(nash), 9.0, "#d62728");
  os << "</svg>\n";
  return os.str();
}

}  // namespace prefgame
