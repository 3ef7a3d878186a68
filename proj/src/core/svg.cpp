#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace msbif {

namespace {

struct CsvTable {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t colon = body.find(':');
      if (colon != std::string::npos && body.find('=') > colon)
        body = body.substr(colon + 1);
      for (const std::string& piece : split(body, ',')) {
        const std::size_t eq = piece.find('=');
        if (eq == std::string::npos) continue;
        t.metadata[trim(piece.substr(0, eq))] = trim(piece.substr(eq + 1));
      }
      continue;
    }
    if (!have_header) {
      t.header = split(line, ',');
      have_header = true;
      continue;
    }
    t.rows.push_back(split(line, ','));
  }
  return t;
}

double to_double(const std::string& s) {
  return s.empty() ? std::numeric_limits<double>::quiet_NaN()
                   : std::strtod(s.c_str(), nullptr);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

class SvgCanvas {
public:
  static constexpr double kWidth = 800, kHeight = 600;
  static constexpr double kLeft = 70, kRight = 25, kTop = 25, kBottom = 55;

  SvgCanvas(Range x, Range y) : x_(x), y_(y) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
             "height=\"600\" viewBox=\"0 0 800 600\">\n";
    body_ << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  }

  double px(double x) const {
    return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom -
           (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }

  void axes(const std::string& xlabel, const std::string& ylabel) {
    body_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
          << kWidth - kLeft - kRight << "\" height=\""
          << kHeight - kTop - kBottom
          << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    char buf[64];
    for (int k = 0; k <= 4; ++k) {
      const double xv = x_.lo + (x_.hi - x_.lo) * k / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * k / 4.0;
      std::snprintf(buf, sizeof buf, "%.4g", xv);
      body_ << "<line x1=\"" << px(xv) << "\" y1=\"" << kHeight - kBottom
            << "\" x2=\"" << px(xv) << "\" y2=\"" << kHeight - kBottom + 6
            << "\" stroke=\"black\"/>\n";
      body_ << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << buf
            << "</text>\n";
      std::snprintf(buf, sizeof buf, "%.4g", yv);
      body_ << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << py(yv) << "\" x2=\""
            << kLeft << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
      body_ << "<text x=\"" << kLeft - 10 << "\" y=\"" << py(yv) + 4
            << "\" font-size=\"12\" text-anchor=\"end\">" << buf
            << "</text>\n";
    }
    body_ << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
          << kHeight - 12 << "\" font-size=\"14\" text-anchor=\"middle\">"
          << xlabel << "</text>\n";
    body_ << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
          << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
             "16 "
          << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, bool dashed = false,
                double width = 1.5) {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"6 4\"";
    body_ << " points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << "," << py(y) << " ";
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts,
               const std::string& fill) {
    if (pts.size() < 3) return;
    body_ << "<polygon fill=\"" << fill << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << "," << py(y) << " ";
    body_ << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << r
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void hline(double y, const std::string& stroke, double width = 1.2) {
    body_ << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\""
          << kWidth - kRight << "\" y2=\"" << py(y) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << width << "\"/>\n";
  }

  void write(const std::string& path) {
    body_ << "</svg>\n";
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
    out << body_.str();
  }

private:
  Range x_, y_;
  std::ostringstream body_;
};

struct BifRow {
  double param;
  double x1;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double beta_sq = std::numeric_limits<double>::quiet_NaN();
  bool det_stable = false;
  bool nonlinear_stable = false;
};

void render_bifurcation(const CsvTable& t, const std::string& out_path) {
  if (t.header.size() < 11 || t.header[0] != "param_name" ||
      t.header[1] != "param_value" || t.header[2] != "branch_id" ||
      t.header[3] != "x_1")
    fail(ErrorCode::schema_mismatch, "not a sweep CSV");
  const std::size_t d = t.header.size() - 10;

  std::map<std::string, std::vector<BifRow>> branches;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      fail(ErrorCode::schema_mismatch, "ragged sweep CSV row");
    BifRow r;
    r.param = to_double(row[1]);
    r.x1 = to_double(row[3]);
    r.lambda = to_double(row[3 + d + 1]);
    r.beta_sq = to_double(row[3 + d + 2]);
    r.det_stable = row[3 + d + 4] == "1";
    r.nonlinear_stable = row[3 + d + 6] == "1";
    branches[row[2]].push_back(r);
  }

  Range xr, yr;
  for (const auto& [id, rows] : branches)
    for (const BifRow& r : rows) {
      xr.include(r.param);
      yr.include(r.x1);
      if (r.nonlinear_stable && std::isfinite(r.beta_sq)) {
        yr.include(r.x1 + std::sqrt(r.beta_sq));
        yr.include(r.x1 - std::sqrt(r.beta_sq));
      }
    }
  xr.finalize();
  yr.finalize();
  SvgCanvas canvas(xr, yr);

  // beta bands first so curves draw on top
  for (const auto& [id, rows] : branches) {
    std::vector<std::pair<double, double>> upper, lower;
    auto flush = [&]() {
      if (upper.size() >= 2) {
        std::vector<std::pair<double, double>> poly = upper;
        poly.insert(poly.end(), lower.rbegin(), lower.rend());
        canvas.polygon(poly, "rgba(100,149,237,0.35)");
      }
      upper.clear();
      lower.clear();
    };
    for (const BifRow& r : rows) {
      if (r.nonlinear_stable && std::isfinite(r.beta_sq)) {
        const double b = std::sqrt(r.beta_sq);
        upper.emplace_back(r.param, r.x1 + b);
        lower.emplace_back(r.param, r.x1 - b);
      } else {
        flush();
      }
    }
    flush();
  }
  for (const auto& [id, rows] : branches) {
    std::vector<std::pair<double, double>> seg;
    bool seg_stable = false;
    auto flush = [&]() {
      canvas.polyline(seg, seg_stable ? "#13305f" : "#8a8a8a", !seg_stable);
      seg.clear();
    };
    for (const BifRow& r : rows) {
      if (!seg.empty() && r.det_stable != seg_stable) {
        seg.emplace_back(r.param, r.x1);  // close the segment at this point
        flush();
      }
      if (seg.empty()) seg_stable = r.det_stable;
      seg.emplace_back(r.param, r.x1);
    }
    flush();
  }
  // red dots at lambda_max sign changes
  for (const auto& [id, rows] : branches) {
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      const double a = rows[k].lambda, b = rows[k + 1].lambda;
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      if ((a < 0.0) == (b < 0.0)) continue;
      const double w = a / (a - b);
      const double p = rows[k].param + w * (rows[k + 1].param - rows[k].param);
      const double x = rows[k].x1 + w * (rows[k + 1].x1 - rows[k].x1);
      canvas.circle(p, x, 5.0, "red");
    }
  }
  auto it = t.metadata.find("model");
  canvas.axes(t.rows.empty() ? "parameter" : t.rows.front()[0],
              it != t.metadata.end() ? "x_1 (" + it->second + ")" : "x_1");
  canvas.write(out_path);
}

void render_paths(const CsvTable& t, const std::string& out_path) {
  if (t.header.size() < 3 || t.header[0] != "t" || t.header[1] != "path_id" ||
      t.header[2] != "x_1")
    fail(ErrorCode::schema_mismatch, "not a paths CSV");

  std::map<long, std::vector<std::pair<double, double>>> paths;
  Range xr, yr;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      fail(ErrorCode::schema_mismatch, "ragged paths CSV row");
    const double time = to_double(row[0]);
    const double x1 = to_double(row[2]);
    paths[std::strtol(row[1].c_str(), nullptr, 10)].emplace_back(time, x1);
    xr.include(time);
    yr.include(x1);
  }

  double beta = std::numeric_limits<double>::quiet_NaN();
  double x_star1 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> equilibria_x1;
  if (auto it = t.metadata.find("beta"); it != t.metadata.end())
    beta = to_double(it->second);
  if (auto it = t.metadata.find("x_star"); it != t.metadata.end())
    x_star1 = to_double(split(it->second, ';').front());
  if (auto it = t.metadata.find("equilibria"); it != t.metadata.end())
    for (const std::string& point : split(it->second, '|'))
      if (!point.empty()) equilibria_x1.push_back(to_double(split(point, ';').front()));

  if (std::isfinite(x_star1)) {
    yr.include(x_star1);
    if (std::isfinite(beta)) {
      yr.include(x_star1 + beta);
      yr.include(x_star1 - beta);
    }
  }
  for (double e : equilibria_x1) yr.include(e);
  xr.finalize();
  yr.finalize();
  SvgCanvas canvas(xr, yr);

  if (std::isfinite(x_star1) && std::isfinite(beta)) {
    canvas.polygon({{xr.lo, x_star1 + beta},
                    {xr.hi, x_star1 + beta},
                    {xr.hi, x_star1 - beta},
                    {xr.lo, x_star1 - beta}},
                   "rgba(100,149,237,0.35)");
  }
  for (double e : equilibria_x1) canvas.hline(e, "#444444");
  if (std::isfinite(x_star1)) canvas.hline(x_star1, "#13305f", 1.6);

  static const char* kPalette[6] = {"#c0392b", "#2980b9", "#27ae60",
                                    "#8e44ad", "#d68910", "#16a085"};
  std::size_t color = 0;
  for (const auto& [id, pts] : paths)
    canvas.polyline(pts, kPalette[color++ % 6], false, 1.0);

  canvas.axes("t", "x_1");
  canvas.write(out_path);
}

}  // namespace

SvgKind svg_kind_from_string(const std::string& name) {
  if (name == "bifurcation") return SvgKind::bifurcation;
  if (name == "paths") return SvgKind::paths;
  fail(ErrorCode::invalid_argument, "svg kind must be bifurcation or paths");
}

SvgKind svg_kind_from_csv(const std::string& csv_path) {
  const CsvTable t = read_csv(csv_path);
  if (!t.header.empty() && t.header[0] == "t") return SvgKind::paths;
  return SvgKind::bifurcation;
}

void render_svg(const std::string& csv_path, SvgKind kind,
                const std::string& out_path) {
  const CsvTable t = read_csv(csv_path);
  if (kind == SvgKind::bifurcation)
    render_bifurcation(t, out_path);
  else
    render_paths(t, out_path);
}

}  // namespace msbif
