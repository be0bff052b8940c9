#include "meancurve/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

namespace meancurve {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f4e9c", "#c2410c", "#15803d", "#7e22ce"};

std::string header(double x0, double y0, double w, double h) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "px\" height=\"" << fmt(h)
    << "px\" viewBox=\"" << fmt(x0) << ' ' << fmt(y0) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n";
  return o.str();
}

// Viridis-like ramp from dark blue to yellow.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(68 + t * (253 - 68)));
  const int g = static_cast<int>(std::lround(1 + t * (231 - 1)));
  const int b = static_cast<int>(std::lround(84 + t * (37 - 84)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string polyline_path(std::span<const Point2> pts) {
  std::string d;
  for (std::size_t k = 0; k < pts.size(); ++k) d += (k ? " L" : "M") + fmt(pts[k].x) + ',' + fmt(pts[k].y);
  return d;
}

}  // namespace

std::string svg_arc_plot(const EvalResult& eval, const std::string& title) {
  constexpr double W = 480, H = 360, L = 60, R = 20, T = 40, B = 50;
  const double pw = W - L - R;
  const double ph = H - T - B;
  std::ostringstream o;
  o << header(0, 0, W, H);
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 10; ++k) {
    const double x = L + pw * k / 10.0;
    const double y = T + ph - ph * k / 10.0;
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt(x) << "\" y2=\"" << T + ph + 4
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\" font-size=\"10\">"
      << fmt(k / 10.0) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << fmt(y + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
      << fmt(k / 10.0) << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">RRE threshold</text>\n";
  o << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << T + ph / 2 << ")\">ARC</text>\n";
  for (std::size_t m = 0; m < eval.methods.size(); ++m) {
    const MethodResult& res = eval.methods[m];
    std::vector<Point2> pts;
    for (std::size_t k = 0; k < kArcPoints; ++k) {
      pts.push_back({L + pw * static_cast<double>(k) / 100.0, T + ph - ph * res.arc[k]});
    }
    const char* color = kPalette[m % 4];
    o << "<path d=\"" << polyline_path(pts) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw - 8 << "\" y=\"" << T + ph - 14 - 16 * m << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
      << color << "\">" << escape(res.name) << " AUC " << fmt(res.auc) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_heatmap(std::span<const double> values, int rows, int cols, const std::string& title,
                        const std::string& row_label, const std::string& col_label) {
  if (rows < 1 || cols < 1 || values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap values do not match rows x cols");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  constexpr double cell = 24, L = 60, T = 40, B = 50, R = 90;
  const double W = L + cell * cols + R;
  const double H = T + cell * rows + B;
  std::ostringstream o;
  o << header(0, 0, W, H);
  o << "<rect x=\"0\" y=\"0\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = values[static_cast<std::size_t>(i * cols + j)];
      const std::string fill = std::isnan(v) ? "#bbbbbb" : ramp(hi > lo ? (v - lo) / (hi - lo) : 0.0);
      // Row 0 at the bottom.
      o << "<rect x=\"" << fmt(L + cell * j) << "\" y=\"" << fmt(T + cell * (rows - 1 - i)) << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"" << fill << "\"><title>" << fmt(v) << "</title></rect>\n";
    }
  }
  o << "<text x=\"" << fmt(L + cell * cols / 2) << "\" y=\"" << fmt(H - 14)
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(col_label) << "</text>\n";
  o << "<text x=\"20\" y=\"" << fmt(T + cell * rows / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 20 "
    << fmt(T + cell * rows / 2) << ")\">" << escape(row_label) << "</text>\n";
  const double lx = L + cell * cols + 16;
  for (int k = 0; k < 10; ++k) {
    o << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(T + cell * rows * (9 - k) / 10.0) << "\" width=\"14\" height=\""
      << fmt(cell * rows / 10.0) << "\" fill=\"" << ramp((k + 0.5) / 10.0) << "\"/>\n";
  }
  if (std::isfinite(lo)) {
    o << "<text x=\"" << fmt(lx + 18) << "\" y=\"" << fmt(T + cell * rows) << "\" font-size=\"10\">" << fmt(lo) << "</text>\n";
    o << "<text x=\"" << fmt(lx + 18) << "\" y=\"" << fmt(T + 8) << "\" font-size=\"10\">" << fmt(hi) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_reconstruction(const Reconstruction& rec, const Inducer& i1, const Inducer& i2,
                               const std::optional<Polyline>& euler, const std::optional<Polyline>& ground_truth) {
  const double gap = distance(i1.position(), i2.position());
  const double arrow = std::max(1.0, 0.15 * gap);
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  const auto grow = [&](std::span<const Point2> pts) {
    for (const Point2& p : pts) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  };
  grow(rec.curve.points());
  if (euler) grow(euler->points());
  if (ground_truth) grow(ground_truth->points());
  const Point2 tips[] = {i1.position() + arrow * unit_vector(i1.theta()), i2.position() + arrow * unit_vector(i2.theta())};
  grow(tips);
  const double pad = std::max(2.0, 0.1 * std::max(x1 - x0, y1 - y0));
  x0 = std::floor(x0 - pad);
  y0 = std::floor(y0 - pad);
  x1 = std::ceil(x1 + pad);
  y1 = std::ceil(y1 + pad);
  const double stroke = std::max(0.5, 0.01 * std::max(x1 - x0, y1 - y0));

  // Darker for more samples; saturates at 10^4.
  const double m = static_cast<double>(rec.mean.m);
  const double shade = 1.0 - std::clamp(std::log1p(m) / std::log1p(1e4), 0.0, 1.0);
  const int level = static_cast<int>(std::lround(200 * shade));
  char gray[8];
  std::snprintf(gray, sizeof gray, "#%02x%02x%02x", level, level, level);

  std::ostringstream o;
  o << header(x0, y0, x1 - x0, y1 - y0);
  o << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0) << "\" height=\"" << fmt(y1 - y0)
    << "\" fill=\"white\"/>\n";
  if (ground_truth) {
    o << "<path d=\"" << polyline_path(ground_truth->points()) << "\" fill=\"none\" stroke=\"#15803d\" stroke-width=\""
      << fmt(stroke) << "\" stroke-dasharray=\"" << fmt(3 * stroke) << "\"/>\n";
  }
  if (euler) {
    o << "<path d=\"" << polyline_path(euler->points()) << "\" fill=\"none\" stroke=\"#c2410c\" stroke-width=\""
      << fmt(stroke) << "\"/>\n";
  }
  o << "<path d=\"" << polyline_path(rec.curve.points()) << "\" fill=\"none\" stroke=\"" << gray << "\" stroke-width=\""
    << fmt(2 * stroke) << "\"><title>m=" << rec.mean.m << "</title></path>\n";
  const Inducer ind[] = {i1, i2};
  for (int k = 0; k < 2; ++k) {
    const Point2 p = ind[k].position();
    o << "<line x1=\"" << fmt(p.x) << "\" y1=\"" << fmt(p.y) << "\" x2=\"" << fmt(tips[k].x) << "\" y2=\"" << fmt(tips[k].y)
      << "\" stroke=\"#1f4e9c\" stroke-width=\"" << fmt(stroke) << "\"/>\n";
    o << "<circle cx=\"" << fmt(p.x) << "\" cy=\"" << fmt(p.y) << "\" r=\"" << fmt(1.5 * stroke)
      << "\" fill=\"#1f4e9c\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string reconstruction_json(const Reconstruction& rec, const Inducer& i1, const Inducer& i2,
                                 const ReconstructOptions& options, const std::optional<Polyline>& euler) {
  const auto points = [](std::span<const Point2> pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const Point2& p : pts) a.push_back({p.x, p.y});
    return a;
  };
  nlohmann::json j;
  j["inducers"] = {{{"x", i1.position().x}, {"y", i1.position().y}, {"theta", i1.theta()}},
                   {{"x", i2.position().x}, {"y", i2.position().y}, {"theta", i2.theta()}}};
  j["relative_configuration"] = {{"x", rec.frame.config.p_xy.x},
                                 {"y", rec.frame.config.p_xy.y},
                                 {"theta", rec.frame.config.p_theta},
                                 {"reflected", rec.frame.config.reflected}};
  j["m"] = rec.mean.m;
  j["flags"] = {{"scale_invariant_used", rec.flags.scale_invariant_used},
                {"midway_extended", rec.flags.midway_extended},
                {"fallback_used", rec.flags.fallback_used}};
  j["nodes"] = rec.nodes;
  j["fallback_nodes"] = rec.fallback_nodes;
  j["max_depth_reached"] = rec.max_depth_reached;
  j["curve"] = points(rec.curve.points());
  nlohmann::json cov = nlohmann::json::array();
  for (const Cov2& c : rec.mean.covariance) cov.push_back({c.xx, c.xy, c.yy});
  j["covariance"] = cov;
  if (euler) j["euler_spiral"] = points(euler->points());
  j["options"] = {{"n", options.n},
                  {"t1_rel_dist", options.tolerances.t1_rel_dist},
                  {"t1_angle", options.tolerances.t1_angle},
                  {"t2_orient", options.tolerances.t2_orient},
                  {"scale_invariant", options.scale_invariant},
                  {"midway_threshold", options.midway_threshold},
                  {"max_depth", options.max_depth},
                  {"fallback", options.fallback}};
  return j.dump(2) + "\n";
}

std::string scale_grid_csv(std::span<const ScaleGridCell> cells) {
  std::ostringstream o;
  o << "theta1,theta2,valid,std_of_mu,mean_of_sigma,scales_used,min_count\n";
  for (const ScaleGridCell& c : cells) {
    std::size_t min_count = c.report.counts.empty() ? 0 : *std::min_element(c.report.counts.begin(), c.report.counts.end());
    o << fmt(c.theta1) << ',' << fmt(c.theta2) << ',' << (c.valid ? 1 : 0) << ','
      << (c.valid ? fmt(c.report.std_of_mu) : "nan") << ',' << (c.valid ? fmt(c.report.mean_of_sigma) : "nan") << ','
      << c.report.scales_used << ',' << min_count << '\n';
  }
  return o.str();
}

}  // namespace meancurve
