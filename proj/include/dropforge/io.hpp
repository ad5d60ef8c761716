#pragma once

// Deterministic CSV, JSON and SVG emitters.

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dropforge/hamiltonian.hpp"
#include "dropforge/integrator.hpp"
#include "dropforge/series.hpp"

namespace dropforge {

/// General format at 17 significant digits.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws std::invalid_argument if a row width differs from the header.
void write_csv(std::ostream& os, const CsvTable& table);

/// Columns Z, R, theta, z, r, H for samples (Z, (R, theta)).
CsvTable trajectory_table(const std::vector<Sample>& rescaled, const ModelParams& p);

/// Trajectory columns for the reference run plus rho, phi, h, eps_rho, eps_phi, dh_dZ.
CsvTable diagnostics_table(const std::vector<DiffDiagnostics>& d, const ModelParams& p);

/// {"n", "K", "R": ["p/q", ...], "theta": [...]}.
nlohmann::ordered_json expansion_json(const FormalSolution& fs);

/// JSON text with two-space indent and a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Marching squares for f = level on an nx-by-ny cell grid over [x0,x1]x[y0,y1].
std::vector<Segment> contour_segments(const std::function<double(double, double)>& f, double x0,
                                      double x1, double y0, double y1, int nx, int ny,
                                      double level);

/// Minimal SVG 1.1 writer. Data coordinates map to a fixed-size canvas with y up.
class SvgDocument {
 public:
  SvgDocument(double x0, double x1, double y0, double y1, int width = 640, int height = 480);

  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width = 1.0);
  void circle(const Vec2& c, double radius_px, const std::string& fill);
  void text(const Vec2& at, const std::string& label, int size_px = 12);
  void segments(const std::vector<Segment>& segs, const std::string& stroke, double width = 0.5);

  std::size_t polyline_count() const { return polylines_; }
  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x0_, x1_, y0_, y1_;
  int width_, height_;
  std::vector<std::string> body_;
  std::size_t polylines_ = 0;
};

}  // namespace dropforge
