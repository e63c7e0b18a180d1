#include "staudt/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace staudt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* point_color(PointRole r) {
  switch (r) {
    case PointRole::Anchor: return "#d62728";
    case PointRole::Unit: return "#9467bd";
    case PointRole::Framing: return "#1f77b4";
    case PointRole::Variable: return "#2ca02c";
    case PointRole::Auxiliary: return "#7f7f7f";
    case PointRole::Bystander: return "#c7c7c7";
  }
  return "#000";
}

std::string summary_svg(const Configuration& cfg, const RenderOptions& opt,
                        const std::string& reason) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  int y = 24;
  auto line = [&](const std::string& t) {
    os << "<text x=\"12\" y=\"" << y << "\" font-family=\"monospace\" font-size=\"13\">"
       << esc(t) << "</text>\n";
    y += 18;
  };
  line("configuration summary (" + reason + ")");
  line("field: " + cfg.field()->name());
  line("points: " + std::to_string(cfg.points().size()) +
       " (bystanders: " + std::to_string(cfg.bystander_count()) + ")");
  line("lines: " + std::to_string(cfg.lines().size()));
  line("free draws: " + std::to_string(cfg.free_count()));
  std::size_t shown = 0;
  for (const auto& ml : cfg.lines()) {
    if (shown >= 24 || y > opt.height - 20) break;
    line("line " + ml.label + " [" + role_name(ml.role) + "] carries " +
         std::to_string(cfg.points_of_line(ml.id).size()) + " points");
    ++shown;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string render_svg(const Configuration& cfg, const RenderOptions& opt) {
  if (!cfg.field()->rational())
    return summary_svg(cfg, opt, "finite field: symbolic rendering");
  if (cfg.points().size() + cfg.lines().size() > opt.max_elements)
    return summary_svg(cfg, opt, "too large to render");

  // affine bounding box of the finite points
  bool any = false;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  std::vector<std::pair<double, double>> coords(cfg.points().size(), {0, 0});
  std::vector<bool> finite(cfg.points().size(), false);
  for (const auto& mp : cfg.points()) {
    if (mp.pt.at_infinity()) continue;
    double x = mpq_class(mp.pt.c[0].rat() / mp.pt.c[2].rat()).get_d();
    double y = mpq_class(mp.pt.c[1].rat() / mp.pt.c[2].rat()).get_d();
    coords[mp.id] = {x, y};
    finite[mp.id] = true;
    if (!any) {
      xmin = xmax = x;
      ymin = ymax = y;
      any = true;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  double spanx = std::max(xmax - xmin, 1e-9), spany = std::max(ymax - ymin, 1e-9);
  xmin -= 0.08 * spanx;
  xmax += 0.08 * spanx;
  ymin -= 0.08 * spany;
  ymax += 0.08 * spany;
  const double margin = 210;  // legend margin on the right
  const double W = opt.width - margin, H = opt.height;
  auto sx = [&](double x) { return (x - xmin) / (xmax - xmin) * (W - 20) + 10; };
  auto sy = [&](double y) { return H - ((y - ymin) / (ymax - ymin) * (H - 20) + 10); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  std::vector<std::string> legend;
  legend.push_back("field Q, chart z = 1");
  // lines clipped against the bounding box
  for (const auto& ml : cfg.lines()) {
    const auto& c = ml.ln.c;
    if (c[0].is_zero() && c[1].is_zero()) {
      legend.push_back("line " + ml.label + ": at infinity");
      continue;
    }
    double a = c[0].rat().get_d(), b = c[1].rat().get_d(), cc = c[2].rat().get_d();
    // intersect a x + b y + c = 0 with the box edges
    std::vector<std::pair<double, double>> hits;
    auto push = [&](double x, double y) {
      if (x >= xmin - 1e-9 && x <= xmax + 1e-9 && y >= ymin - 1e-9 && y <= ymax + 1e-9)
        hits.push_back({x, y});
    };
    if (std::fabs(b) > 1e-12) {
      push(xmin, (-cc - a * xmin) / b);
      push(xmax, (-cc - a * xmax) / b);
    }
    if (std::fabs(a) > 1e-12) {
      push((-cc - b * ymin) / a, ymin);
      push((-cc - b * ymax) / a, ymax);
    }
    if (hits.size() >= 2) {
      os << "<line x1=\"" << fmt(sx(hits[0].first)) << "\" y1=\"" << fmt(sy(hits[0].second))
         << "\" x2=\"" << fmt(sx(hits[1].first)) << "\" y2=\"" << fmt(sy(hits[1].second))
         << "\" stroke=\"" << (ml.role == LineRole::Anchor ? "#d62728" : "#404040")
         << "\" stroke-width=\"" << (is_horizontal(ml.ln) ? "1.4" : "0.7") << "\"/>\n";
    } else {
      legend.push_back("line " + ml.label + ": outside viewport");
    }
  }
  for (const auto& mp : cfg.points()) {
    if (!finite[mp.id]) {
      legend.push_back("point " + mp.label + ": at infinity " + mp.pt.str());
      continue;
    }
    auto [x, y] = coords[mp.id];
    os << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y)) << "\" r=\""
       << (mp.role == PointRole::Bystander ? "2" : "3.4") << "\" fill=\""
       << point_color(mp.role) << "\"/>\n";
    if (mp.role != PointRole::Bystander)
      os << "<text x=\"" << fmt(sx(x) + 5) << "\" y=\"" << fmt(sy(y) - 5)
         << "\" font-family=\"monospace\" font-size=\"10\">" << esc(mp.label) << "</text>\n";
  }
  double ly = 20;
  os << "<rect x=\"" << fmt(W + 4) << "\" y=\"0\" width=\"" << fmt(margin - 4)
     << "\" height=\"100%\" fill=\"#f4f4f4\"/>\n";
  for (const auto& t : legend) {
    if (ly > H - 12) break;
    os << "<text x=\"" << fmt(W + 10) << "\" y=\"" << fmt(ly)
       << "\" font-family=\"monospace\" font-size=\"10\">" << esc(t) << "</text>\n";
    ly += 14;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace staudt
