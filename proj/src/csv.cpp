#include "tcmap/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tcmap::csv {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string schema_row() {
  return "schema_version," + std::to_string(kSchemaVersion) + "\n";
}

std::string join_row(std::span<const std::string> cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace tcmap::csv

namespace tcmap::svg {

namespace {

struct Ax {
  double lo, hi, px0, px1;
  double to_px(double v) const {
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

}  // namespace

void write_loglog_plot(const std::string& path, std::span<const double> xs,
                       std::span<const double> ys, double fit_slope,
                       double fit_intercept, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("plot needs matching nonempty coordinates");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0))
      throw std::invalid_argument("log-log plot needs positive data");
    lx[i] = std::log10(xs[i]);
    ly[i] = std::log10(ys[i]);
  }
  auto [xmin, xmax] = std::minmax_element(lx.begin(), lx.end());
  auto [ymin, ymax] = std::minmax_element(ly.begin(), ly.end());
  double padx = std::max(0.05, (*xmax - *xmin) * 0.08);
  double pady = std::max(0.05, (*ymax - *ymin) * 0.08);
  Ax X{*xmin - padx, *xmax + padx, 60, 560};
  Ax Y{*ymin - pady, *ymax + pady, 360, 40};

  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='620' height='420' "
       "viewBox='0 0 620 420'>\n"
    << "<rect width='620' height='420' fill='white'/>\n"
    << "<text x='310' y='22' text-anchor='middle' font-size='14'>" << title
    << "</text>\n"
    << "<line x1='60' y1='360' x2='560' y2='360' stroke='black'/>\n"
    << "<line x1='60' y1='40' x2='60' y2='360' stroke='black'/>\n"
    << "<text x='310' y='400' text-anchor='middle' font-size='12'>" << xlabel
    << " (log10)</text>\n"
    << "<text x='18' y='200' text-anchor='middle' font-size='12' "
       "transform='rotate(-90 18 200)'>"
    << ylabel << " (log10)</text>\n";
  // fitted line, converted from natural-log fit to log10 axes
  double lne10 = std::log(10.0);
  auto fit_ly = [&](double lgx) {
    return (fit_intercept + fit_slope * (lgx * lne10)) / lne10;
  };
  s << "<line x1='" << X.to_px(X.lo + padx / 2) << "' y1='"
    << Y.to_px(fit_ly(X.lo + padx / 2)) << "' x2='" << X.to_px(X.hi - padx / 2)
    << "' y2='" << Y.to_px(fit_ly(X.hi - padx / 2))
    << "' stroke='#2166ac' stroke-width='1.5'/>\n";
  for (std::size_t i = 0; i < lx.size(); ++i) {
    s << "<circle cx='" << X.to_px(lx[i]) << "' cy='" << Y.to_px(ly[i])
      << "' r='3.5' fill='#b2182b'/>\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "slope = %.4f", fit_slope);
  s << "<text x='440' y='60' font-size='12'>" << buf << "</text>\n</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << s.str();
}

}  // namespace tcmap::svg
