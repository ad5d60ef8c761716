#include "dropforge/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dropforge {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& os, const CsvTable& table) {
  if (table.header.empty()) throw std::invalid_argument("CSV needs a header");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    os << (i ? "," : "") << table.header[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("ragged CSV row");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

namespace {

std::vector<double> trajectory_row(const Sample& s, const ModelParams& p) {
  const DropState d = from_rescaled({s.y[0], s.y[1], s.x});
  return {s.x, s.y[0], s.y[1], d.z, d.r, hamiltonian(s.y[0], s.y[1], p)};
}

}  // namespace

CsvTable trajectory_table(const std::vector<Sample>& rescaled, const ModelParams& p) {
  CsvTable t{{"Z", "R", "theta", "z", "r", "H"}, {}};
  t.rows.reserve(rescaled.size());
  for (const Sample& s : rescaled) t.rows.push_back(trajectory_row(s, p));
  return t;
}

CsvTable diagnostics_table(const std::vector<DiffDiagnostics>& d, const ModelParams& p) {
  CsvTable t{{"Z", "R", "theta", "z", "r", "H", "rho", "phi", "h", "eps_rho", "eps_phi", "dh_dZ"},
             {}};
  t.rows.reserve(d.size());
  for (const DiffDiagnostics& x : d) {
    std::vector<double> row = trajectory_row({x.Z, {x.R, x.theta}}, p);
    row.insert(row.end(), {x.rho, x.phi, x.h, x.eps_rho, x.eps_phi, x.dh_dZ});
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::ordered_json expansion_json(const FormalSolution& fs) {
  nlohmann::ordered_json j;
  j["n"] = fs.params.n();
  j["K"] = fs.order();
  auto& R = j["R"] = nlohmann::ordered_json::array();
  auto& th = j["theta"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k <= fs.order(); ++k) {
    R.push_back(to_string(fs.R[k]));
    th.push_back(to_string(fs.theta[k]));
  }
  return j;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<Segment> contour_segments(const std::function<double(double, double)>& f, double x0,
                                      double x1, double y0, double y1, int nx, int ny,
                                      double level) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) {
    throw std::invalid_argument("contour grid needs positive cell counts and extents");
  }
  const double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
  std::vector<double> v((nx + 1) * (ny + 1));
  auto at = [&](int i, int j) -> double& { return v[j * (nx + 1) + i]; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) at(i, j) = f(x0 + i * dx, y0 + j * dy) - level;
  }

  std::vector<Segment> out;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Corners counter-clockwise from the lower left.
      const std::array<Vec2, 4> c{{{x0 + i * dx, y0 + j * dy},
                                   {x0 + (i + 1) * dx, y0 + j * dy},
                                   {x0 + (i + 1) * dx, y0 + (j + 1) * dy},
                                   {x0 + i * dx, y0 + (j + 1) * dy}}};
      const std::array<double, 4> f4{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      std::vector<Vec2> cuts;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((f4[a] < 0.0) != (f4[b] < 0.0)) {
          const double w = f4[a] / (f4[a] - f4[b]);
          cuts.push_back({c[a][0] + w * (c[b][0] - c[a][0]), c[a][1] + w * (c[b][1] - c[a][1])});
        }
      }
      if (cuts.size() == 2) {
        out.push_back({cuts[0], cuts[1]});
      } else if (cuts.size() == 4) {
        // Saddle: decide by the cell-center value.
        const double mid = 0.25 * (f4[0] + f4[1] + f4[2] + f4[3]);
        if ((mid < 0.0) == (f4[0] < 0.0)) {
          out.push_back({cuts[0], cuts[1]});
          out.push_back({cuts[2], cuts[3]});
        } else {
          out.push_back({cuts[0], cuts[3]});
          out.push_back({cuts[1], cuts[2]});
        }
      }
    }
  }
  return out;
}

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

SvgDocument::SvgDocument(double x0, double x1, double y0, double y1, int width, int height)
    : x0_(x0), x1_(x1), y0_(y0), y1_(y1), width_(width), height_(height) {
  if (!(x1 > x0) || !(y1 > y0) || width <= 0 || height <= 0) {
    throw std::invalid_argument("SVG extent must be non-empty");
  }
}

double SvgDocument::px(double x) const { return (x - x0_) / (x1_ - x0_) * width_; }
double SvgDocument::py(double y) const { return (y1_ - y) / (y1_ - y0_) * height_; }

void SvgDocument::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + escape_xml(stroke) + "\" stroke-width=\"" +
                  fmt3(width) + "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s += (i ? " " : "") + fmt3(px(pts[i][0])) + "," + fmt3(py(pts[i][1]));
  }
  s += "\"/>";
  body_.push_back(std::move(s));
  ++polylines_;
}

void SvgDocument::circle(const Vec2& c, double radius_px, const std::string& fill) {
  body_.push_back("<circle cx=\"" + fmt3(px(c[0])) + "\" cy=\"" + fmt3(py(c[1])) + "\" r=\"" +
                  fmt3(radius_px) + "\" fill=\"" + escape_xml(fill) + "\"/>");
}

void SvgDocument::text(const Vec2& at, const std::string& label, int size_px) {
  body_.push_back("<text x=\"" + fmt3(px(at[0])) + "\" y=\"" + fmt3(py(at[1])) +
                  "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size_px) + "\">" +
                  escape_xml(label) + "</text>");
}

void SvgDocument::segments(const std::vector<Segment>& segs, const std::string& stroke,
                           double width) {
  if (segs.empty()) return;
  std::string d;
  for (const Segment& s : segs) {
    d += "M" + fmt3(px(s.a[0])) + "," + fmt3(py(s.a[1])) + "L" + fmt3(px(s.b[0])) + "," +
         fmt3(py(s.b[1]));
  }
  body_.push_back("<path fill=\"none\" stroke=\"" + escape_xml(stroke) + "\" stroke-width=\"" +
                  fmt3(width) + "\" d=\"" + d + "\"/>");
}

std::string SvgDocument::str() const {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_
     << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const std::string& line : body_) os << line << '\n';
  os << "</svg>\n";
  return os.str();
}

}  // namespace dropforge
