#include "cq/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

namespace cq {

namespace {

Rect tight_bounds(const std::vector<Point>& pts) {
  Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    r.x0 = std::min(r.x0, p.pos.x);
    r.y0 = std::min(r.y0, p.pos.y);
    r.x1 = std::max(r.x1, p.pos.x);
    r.y1 = std::max(r.y1, p.pos.y);
  }
  return r;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& cell, std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw_error(Error::Kind::parse, "line " + std::to_string(line_no) + ": cell '" + cell +
                                        "' in column '" + column + "' is not a finite number");
  }
  return value;
}

std::uint64_t parse_id(const std::string& cell, std::size_t line_no) {
  std::uint64_t value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw_error(Error::Kind::parse,
                "line " + std::to_string(line_no) + ": cell '" + cell + "' is not a valid id");
  }
  return value;
}

int find_column(const std::vector<std::string>& header, std::initializer_list<const char*> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = lower(header[i]);
    for (const char* n : names) {
      if (h == n) return static_cast<int>(i);
    }
  }
  return -1;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Catalog::Catalog(std::vector<Point> points, std::vector<std::string> attr_names)
    : points_(std::move(points)), attr_names_(std::move(attr_names)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points_.size());
  for (const auto& p : points_) {
    if (!seen.insert(p.id).second) {
      throw_error(Error::Kind::integrity, "duplicate point id " + std::to_string(p.id));
    }
    if (p.attrs.size() != attr_names_.size()) {
      throw_error(Error::Kind::integrity,
                  "point " + std::to_string(p.id) + " has " + std::to_string(p.attrs.size()) +
                      " attrs, expected " + std::to_string(attr_names_.size()));
    }
  }
  if (!points_.empty()) {
    bounds_ = tight_bounds(points_);
    has_bounds_ = true;
  }
}

const Rect& Catalog::bounds() const {
  if (!has_bounds_) {
    throw_error(Error::Kind::contract, "bounds() on an empty catalog");
  }
  return bounds_;
}

Catalog load_csv(const std::string& path, const std::vector<std::string>& attr_columns) {
  std::ifstream in(path);
  if (!in) {
    throw_error(Error::Kind::io, "cannot open catalog file: " + path);
  }

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) {
    throw_error(Error::Kind::schema, path + ": no header row found");
  }

  const int id_col = find_column(header, {"id", "objid", "obj_id"});
  const int x_col = find_column(header, {"x", "ra"});
  const int y_col = find_column(header, {"y", "dec"});
  if (id_col < 0) throw_error(Error::Kind::schema, path + ": missing required column 'id'");
  if (x_col < 0) throw_error(Error::Kind::schema, path + ": missing required column 'x'");
  if (y_col < 0) throw_error(Error::Kind::schema, path + ": missing required column 'y'");

  std::vector<int> attr_cols;
  for (const auto& name : attr_columns) {
    int col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower(header[i]) == lower(name)) {
        col = static_cast<int>(i);
        break;
      }
    }
    if (col < 0) {
      throw_error(Error::Kind::schema, path + ": missing attribute column '" + name + "'");
    }
    attr_cols.push_back(col);
  }

  std::vector<Point> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size()) {
      throw_error(Error::Kind::parse, "line " + std::to_string(line_no) + ": expected " +
                                          std::to_string(header.size()) + " cells, got " +
                                          std::to_string(cells.size()));
    }
    Point p;
    p.id = parse_id(cells[static_cast<std::size_t>(id_col)], line_no);
    p.pos.x = parse_double(cells[static_cast<std::size_t>(x_col)], line_no, header[static_cast<std::size_t>(x_col)]);
    p.pos.y = parse_double(cells[static_cast<std::size_t>(y_col)], line_no, header[static_cast<std::size_t>(y_col)]);
    p.attrs.reserve(attr_cols.size());
    for (std::size_t a = 0; a < attr_cols.size(); ++a) {
      p.attrs.push_back(parse_double(cells[static_cast<std::size_t>(attr_cols[a])], line_no,
                                     attr_columns[a]));
    }
    points.push_back(std::move(p));
  }

  return Catalog(std::move(points), attr_columns);
}

void write_csv(const Catalog& catalog, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw_error(Error::Kind::io, "cannot write catalog file: " + path);
  }
  out << "id,x,y";
  for (const auto& name : catalog.attr_names()) out << ',' << name;
  out << '\n';
  char buf[64];
  const auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& p : catalog.points()) {
    out << p.id;
    emit(p.pos.x);
    emit(p.pos.y);
    for (double a : p.attrs) emit(a);
    out << '\n';
  }
}

Catalog generate_uniform(std::size_t n, Rect region,
                         const std::vector<std::pair<double, double>>& attr_ranges,
                         std::uint64_t seed) {
  if (region.width() < 0 || region.height() < 0) {
    throw_error(Error::Kind::contract, "generate_uniform: inverted region");
  }
  if (region.area() == 0.0 && n > 1) {
    throw_error(Error::Kind::generation, "generate_uniform: degenerate region cannot hold " +
                                             std::to_string(n) + " points");
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    p.id = i + 1;
    p.pos.x = uniform_in(rng, region.x0, region.x1);
    p.pos.y = uniform_in(rng, region.y0, region.y1);
    p.attrs.reserve(attr_ranges.size());
    for (const auto& [lo, hi] : attr_ranges) p.attrs.push_back(uniform_in(rng, lo, hi));
    points.push_back(std::move(p));
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < attr_ranges.size(); ++i) names.push_back("a" + std::to_string(i));
  return Catalog(std::move(points), std::move(names));
}

Catalog generate_dense(std::size_t n, const QueryPattern& base_pattern, double scale_lo,
                       double scale_hi, std::size_t planted, std::uint64_t seed, Rect region) {
  const std::size_t k = static_cast<std::size_t>(base_pattern.size());
  if (k < 3) {
    throw_error(Error::Kind::contract, "generate_dense: base pattern needs at least 3 elements");
  }
  if (!(scale_lo > 0.0) || scale_lo > scale_hi) {
    throw_error(Error::Kind::contract, "generate_dense: need 0 < scale_lo <= scale_hi");
  }
  if (n < planted * k) {
    throw_error(Error::Kind::contract, "generate_dense: n must be at least planted * k");
  }

  // Pattern offsets from its own bounding-box corner.
  Rect pbox{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& e : base_pattern.elements) {
    pbox.x0 = std::min(pbox.x0, e.position.x);
    pbox.y0 = std::min(pbox.y0, e.position.y);
    pbox.x1 = std::max(pbox.x1, e.position.x);
    pbox.y1 = std::max(pbox.y1, e.position.y);
  }

  const double max_w = pbox.width() * scale_hi;
  const double max_h = pbox.height() * scale_hi;
  if (planted > 0 && (max_w > region.width() || max_h > region.height())) {
    throw_error(Error::Kind::generation,
                "generate_dense: region too small to contain a scaled pattern copy");
  }

  std::mt19937_64 rng(seed);
  std::vector<Point> points;
  points.reserve(n);
  std::uint64_t next_id = 1;

  const bool with_attrs = base_pattern.has_attrs();
  const std::size_t attr_len = with_attrs ? base_pattern.elements.front().attrs.size() : 0;

  for (std::size_t inst = 0; inst < planted; ++inst) {
    const double f = uniform_in(rng, scale_lo, scale_hi);
    const double tx = uniform_in(rng, region.x0, region.x1 - pbox.width() * f);
    const double ty = uniform_in(rng, region.y0, region.y1 - pbox.height() * f);
    for (const auto& e : base_pattern.elements) {
      Point p;
      p.id = next_id++;
      p.pos.x = tx + (e.position.x - pbox.x0) * f;
      p.pos.y = ty + (e.position.y - pbox.y0) * f;
      p.attrs = e.attrs;
      points.push_back(std::move(p));
    }
  }

  // Filler attr ranges: the pattern's own attribute spread, widened by one
  // range width on each side so most noise fails the property screen only
  // when theta is tight.
  std::vector<std::pair<double, double>> attr_ranges(attr_len, {0.0, 0.0});
  if (with_attrs) {
    for (std::size_t a = 0; a < attr_len; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& e : base_pattern.elements) {
        lo = std::min(lo, e.attrs[a]);
        hi = std::max(hi, e.attrs[a]);
      }
      const double w = std::max(hi - lo, 1.0);
      attr_ranges[a] = {lo - w, hi + w};
    }
  }

  for (std::size_t i = planted * k; i < n; ++i) {
    Point p;
    p.id = next_id++;
    p.pos.x = uniform_in(rng, region.x0, region.x1);
    p.pos.y = uniform_in(rng, region.y0, region.y1);
    p.attrs.reserve(attr_len);
    for (const auto& [lo, hi] : attr_ranges) p.attrs.push_back(uniform_in(rng, lo, hi));
    points.push_back(std::move(p));
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < attr_len; ++i) names.push_back("a" + std::to_string(i));
  return Catalog(std::move(points), std::move(names));
}

}  // namespace cq
