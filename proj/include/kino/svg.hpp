#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "kino/geometry.hpp"
#include "kino/trajectory.hpp"
#include "kino/world.hpp"

namespace kino {

/// Drawable results collected from planners and optimizers.
struct RenderArtifacts {
  std::vector<TrajectoryN> trajectories;
  std::vector<std::vector<std::vector<double>>> paths;  // config polylines
  std::vector<std::vector<Vec2>> tree_edges;
};

struct RenderMode {
  enum Kind { kWorkspace, kPhase } kind = kWorkspace;
  std::size_t axis = 0;  // phase-plane axis
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

class SvgWriter {
 public:
  SvgWriter(double x0, double y0, double x1, double y1) {
    // SVG y grows downward; flip by emitting y' = (y0 + y1) - y.
    y_flip_ = y0 + y1;
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" +
             fmt(x0) + " " + fmt(y0) + " " + fmt(x1 - x0) + " " +
             fmt(y1 - y0) + "\">\n";
    stroke_width_ = std::max(x1 - x0, y1 - y0) / 400.0;
  }

  double stroke_width() const { return stroke_width_; }

  void polygon(const Polygon& poly, const std::string& fill) {
    body_ += "<polygon points=\"";
    for (const auto& p : poly)
      body_ += fmt(p.x) + "," + fmt(y_flip_ - p.y) + " ";
    body_ += "\" fill=\"" + fill + "\" stroke=\"none\"/>\n";
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& color,
                double width) {
    if (pts.size() < 2) return;
    body_ += "<polyline points=\"";
    for (const auto& p : pts)
      body_ += fmt(p.x) + "," + fmt(y_flip_ - p.y) + " ";
    body_ += "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             fmt(width) + "\"/>\n";
  }

  void circle(Vec2 c, double r, const std::string& color) {
    body_ += "<circle cx=\"" + fmt(c.x) + "\" cy=\"" + fmt(y_flip_ - c.y) +
             "\" r=\"" + fmt(r) + "\" fill=\"" + color + "\"/>\n";
  }

  void rect_outline(double x0, double y0, double x1, double y1,
                    const std::string& color) {
    polyline({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}, color,
             stroke_width_ * 0.5);
  }

  std::string finish() { return body_ + "</svg>\n"; }

 private:
  std::string body_;
  double y_flip_ = 0.0;
  double stroke_width_ = 1.0;
};

inline std::vector<Vec2> sample_workspace(const TrajectoryN& traj,
                                          int samples = 256) {
  std::vector<Vec2> pts;
  if (traj.dims() < 2) return pts;
  for (int k = 0; k <= samples; ++k) {
    const PhaseStateN x = evaluate(traj, traj.duration * k / samples);
    pts.push_back({x.q[0], x.q[1]});
  }
  return pts;
}

}  // namespace detail

/// Renders the scene and artifacts to an SVG document. Workspace mode
/// shows obstacles, tree edges, configuration paths, and trajectories
/// (chain robots are drawn as arm snapshots). Phase mode plots one axis's
/// (q, qd) curve with the switching points marked.
inline std::string render_svg(const Scene& scene,
                              const RenderArtifacts& artifacts,
                              const RenderMode& mode = {}) {
  if (mode.kind == RenderMode::kPhase) {
    const std::size_t axis = mode.axis;
    // Collect phase curves and their switch points.
    std::vector<std::vector<Vec2>> curves;
    std::vector<Vec2> switches;
    double x0 = 0, x1 = 1, y0 = -1, y1 = 1;
    bool first = true;
    for (const auto& traj : artifacts.trajectories) {
      if (axis >= traj.dims()) continue;
      std::vector<Vec2> pts;
      for (int k = 0; k <= 512; ++k) {
        const PhaseStateN x = evaluate(traj, traj.duration * k / 512);
        pts.push_back({x.q[axis], x.qd[axis]});
      }
      double t = 0.0;
      for (const auto& seg : traj.axes[axis].segments) {
        t += seg.duration;
        if (t < traj.duration) {
          const PhaseStateN x = evaluate(traj, t);
          switches.push_back({x.q[axis], x.qd[axis]});
        }
      }
      for (const auto& p : pts) {
        if (first) {
          x0 = x1 = p.x;
          y0 = y1 = p.y;
          first = false;
        }
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
      }
      curves.push_back(std::move(pts));
    }
    const double mx = std::max(1e-6, (x1 - x0) * 0.08);
    const double my = std::max(1e-6, (y1 - y0) * 0.08);
    detail::SvgWriter svg(x0 - mx, y0 - my, x1 + mx, y1 + my);
    // qd = 0 axis for orientation.
    svg.polyline({{x0 - mx, 0.0}, {x1 + mx, 0.0}}, "#bbbbbb",
                 svg.stroke_width() * 0.5);
    for (const auto& c : curves)
      svg.polyline(c, "#2266cc", svg.stroke_width());
    for (const auto& s : switches)
      svg.circle(s, svg.stroke_width() * 2.5, "#cc3322");
    return svg.finish();
  }

  const Interval bx = scene.q_bounds[0];
  const Interval by = scene.dims() > 1 ? scene.q_bounds[1] : Interval{-1, 1};
  const bool chain = std::holds_alternative<PlanarChain>(scene.robot);
  double x0 = bx.lo, x1 = bx.hi, y0 = by.lo, y1 = by.hi;
  if (chain) {
    const auto& c = std::get<PlanarChain>(scene.robot);
    const double reach = c.links * c.link_length;
    x0 = c.base.x - reach;
    x1 = c.base.x + reach;
    y0 = c.base.y - reach;
    y1 = c.base.y + reach;
  }
  const double mx = std::max(1e-6, (x1 - x0) * 0.03);
  const double my = std::max(1e-6, (y1 - y0) * 0.03);
  detail::SvgWriter svg(x0 - mx, y0 - my, x1 + mx, y1 + my);
  if (!chain) svg.rect_outline(bx.lo, by.lo, bx.hi, by.hi, "#999999");
  for (const auto& poly : scene.obstacles) svg.polygon(poly, "#555555");

  for (const auto& edge : artifacts.tree_edges)
    svg.polyline(edge, "#88bbee", svg.stroke_width() * 0.4);

  for (const auto& path : artifacts.paths) {
    if (chain) {
      const auto& c = std::get<PlanarChain>(scene.robot);
      for (const auto& q : path) {
        const auto segs = fk_chain(c, q);
        std::vector<Vec2> pts{segs.front().a};
        for (const auto& s : segs) pts.push_back(s.b);
        svg.polyline(pts, "#dd8833", svg.stroke_width() * 0.5);
      }
    } else {
      std::vector<Vec2> pts;
      for (const auto& q : path)
        pts.push_back({q[0], path.front().size() > 1 ? q[1] : 0.0});
      svg.polyline(pts, "#dd8833", svg.stroke_width());
    }
  }

  const char* colors[] = {"#22aa44", "#8833cc", "#cc3322", "#2266cc"};
  int color_idx = 0;
  for (const auto& traj : artifacts.trajectories) {
    const std::string color = colors[color_idx++ % 4];
    if (chain) {
      const auto& c = std::get<PlanarChain>(scene.robot);
      const int snapshots = 24;
      for (int k = 0; k <= snapshots; ++k) {
        const PhaseStateN x = evaluate(traj, traj.duration * k / snapshots);
        const auto segs = fk_chain(c, x.q);
        std::vector<Vec2> pts{segs.front().a};
        for (const auto& s : segs) pts.push_back(s.b);
        svg.polyline(pts, color, svg.stroke_width() * 0.4);
      }
    } else {
      const auto pts = detail::sample_workspace(traj);
      svg.polyline(pts, color, svg.stroke_width());
      if (!pts.empty()) {
        svg.circle(pts.front(), svg.stroke_width() * 3.0, "#22aa44");
        svg.circle(pts.back(), svg.stroke_width() * 3.0, "#cc3322");
      }
    }
  }
  return svg.finish();
}

}  // namespace kino
