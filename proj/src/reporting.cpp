#include "hrma/reporting.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hrma::report {
namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string escape_xml(std::string_view s) {
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

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    const std::size_t j = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

double parse_real(std::string_view token, const std::string& field) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError(field, "expected a finite real, got '" + std::string(token) + "'");
  return v;
}

std::vector<double> parse_reals(std::string_view value, const std::string& field) {
  std::vector<double> out;
  for (auto tok : split_ws(value)) out.push_back(parse_real(tok, field));
  if (out.empty()) throw ConfigError(field, "expected at least one real");
  return out;
}

std::size_t parse_size(std::string_view value, const std::string& field) {
  std::size_t v = 0;
  const auto t = trim(value);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(field, "expected a non-negative integer, got '" + std::string(t) + "'");
  return v;
}

// Axis suffix ".y1" / ".y2" -> 0 / 1; no suffix -> 0 (one-dimensional data).
std::optional<std::size_t> axis_of(std::string_view key, std::string_view stem) {
  if (key == stem) return 0;
  if (key.size() == stem.size() + 3 && key.substr(0, stem.size()) == stem &&
      key.substr(stem.size(), 2) == ".y") {
    const char d = key.back();
    if (d == '1' || d == '2') return static_cast<std::size_t>(d - '1');
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvTable: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_file(path, str()); }

// ---------------------------------------------------------------------------
// SVG

namespace {
constexpr double kMargin = 40.0;
}

SvgFigure::SvgFigure(double width, double height, mass::Box data_box, std::string title)
    : width_(width), height_(height), box_(data_box), title_(std::move(title)) {
  if (!(box_.t_hi > box_.t_lo) || !(box_.y_hi > box_.y_lo))
    throw std::invalid_argument("SvgFigure: empty data box");
}

double SvgFigure::px(double t) const {
  return kMargin + (t - box_.t_lo) / (box_.t_hi - box_.t_lo) * (width_ - 2 * kMargin);
}

double SvgFigure::py(double y) const {
  return height_ - kMargin - (y - box_.y_lo) / (box_.y_hi - box_.y_lo) * (height_ - 2 * kMargin);
}

void SvgFigure::polyline(std::span<const mass::Point> pts, std::string_view stroke,
                         double stroke_width) {
  std::string s = "<polyline fill=\"none\" stroke=\"" + escape_xml(stroke) +
                  "\" stroke-width=\"" + fixed(stroke_width) + "\" points=\"";
  bool first = true;
  for (const auto& p : pts) {
    if (!std::isfinite(p.t) || !std::isfinite(p.y)) continue;
    if (!first) s += ' ';
    s += fixed(px(p.t)) + ',' + fixed(py(p.y));
    first = false;
  }
  s += "\"/>";
  body_.push_back(std::move(s));
}

void SvgFigure::rect(mass::Box b, std::string_view fill, double opacity) {
  const double x0 = px(b.t_lo), x1 = px(b.t_hi);
  const double y0 = py(b.y_hi), y1 = py(b.y_lo);
  body_.push_back("<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(y0) + "\" width=\"" +
                  fixed(x1 - x0) + "\" height=\"" + fixed(y1 - y0) + "\" fill=\"" +
                  escape_xml(fill) + "\" fill-opacity=\"" + fixed(opacity) + "\"/>");
}

void SvgFigure::label(double t, double y, std::string_view text) {
  body_.push_back("<text x=\"" + fixed(px(t)) + "\" y=\"" + fixed(py(y)) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(text) +
                  "</text>");
}

std::string SvgFigure::str() const {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width_) << "\" height=\""
     << fixed(height_) << "\" viewBox=\"0 0 " << fixed(width_) << ' ' << fixed(height_)
     << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width_) << "\" height=\"" << fixed(height_)
     << "\" fill=\"white\"/>\n";
  // Frame with the data-box extents at the corners.
  os << "<rect x=\"" << fixed(kMargin) << "\" y=\"" << fixed(kMargin) << "\" width=\""
     << fixed(width_ - 2 * kMargin) << "\" height=\"" << fixed(height_ - 2 * kMargin)
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  auto tick = [&](double x, double y, const std::string& s, const char* anchor) {
    os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(y)
       << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"" << anchor << "\">"
       << escape_xml(s) << "</text>\n";
  };
  char buf[32];
  auto g = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  tick(kMargin, height_ - kMargin + 14, g(box_.t_lo), "start");
  tick(width_ - kMargin, height_ - kMargin + 14, g(box_.t_hi), "end");
  tick(kMargin - 4, height_ - kMargin, g(box_.y_lo), "end");
  tick(kMargin - 4, kMargin + 10, g(box_.y_hi), "end");
  if (!title_.empty()) tick(width_ / 2, kMargin - 12, title_, "middle");
  for (const auto& b : body_) os << b << '\n';
  os << "</svg>\n";
  return os.str();
}

void SvgFigure::write(const std::filesystem::path& path) const { write_file(path, str()); }

// ---------------------------------------------------------------------------
// Config

void RunConfig::validate() const {
  const std::pair<const char*, std::size_t> sizes[] = {
      {"moment_nodes", moment_nodes}, {"x_nodes", x_nodes}, {"s_mesh", s_mesh}, {"raster", raster}};
  for (const auto& [field, v] : sizes)
    if (v < 64) throw ConfigError(field, "grid sizes must be at least 64");
  if (T && !(*T > 0.0 && std::isfinite(*T))) throw ConfigError("T", "must be positive and finite");
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("u0", e.what());
  }
}

std::vector<std::string> builtin_names() { return {"fubini-study", "p1xp1"}; }

RunConfig builtin(std::string_view name) {
  RunConfig c;
  c.name = std::string(name);
  if (name == "fubini-study") {
    c.data = toric::fubini_study();
  } else if (name == "p1xp1") {
    c.data = toric::p1xp1();
  } else {
    throw ConfigError("builtin", "unknown builtin '" + std::string(name) +
                                     "' (known: fubini-study, p1xp1)");
  }
  return c;
}

RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::multimap<std::string, Entry> entries;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "missing key");
    if (value.empty()) throw ConfigError(std::string(key), "missing value");
    if (key != "facet" && entries.count(std::string(key)))
      throw ConfigError(std::string(key), "given more than once");
    entries.emplace(std::string(key), Entry{std::string(value), line_no});
  }

  auto take = [&entries](const std::string& key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    auto v = it->second.value;
    entries.erase(it);
    return v;
  };

  RunConfig c;
  c.name = take("name").value_or("config");

  const auto dim_text = take("dimension");
  if (!dim_text) throw ConfigError("dimension", "required (1 or 2)");
  const std::size_t n = parse_size(*dim_text, "dimension");
  if (n != 1 && n != 2) throw ConfigError("dimension", "must be 1 or 2");

  std::vector<toric::Facet> facets;
  for (auto [it, end] = entries.equal_range("facet"); it != end; ++it) {
    const auto vals = parse_reals(it->second.value, "facet");
    if (vals.size() != n + 1)
      throw ConfigError("facet", "line " + std::to_string(it->second.line) + ": expected " +
                                     std::to_string(n) + " normal components and an offset");
    facets.push_back({{vals.begin(), vals.end() - 1}, vals.back()});
  }
  entries.erase("facet");
  if (facets.empty()) throw ConfigError("facet", "required (2 per dimension)");
  try {
    c.data.polytope = toric::Polytope::from_facets(std::move(facets));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("facet", e.what());
  }

  if (const auto sep = take("separable"); sep && *sep != "true")
    throw ConfigError("separable", "only separable data (true) is supported");

  const auto u0 = take("u0").value_or("guillemin");
  if (u0 == "guillemin") {
    c.data.potential = toric::PotentialKind::guillemin;
  } else if (u0 == "guillemin_plus_smooth") {
    c.data.potential = toric::PotentialKind::guillemin_plus_smooth;
  } else {
    throw ConfigError("u0", "expected guillemin or guillemin_plus_smooth, got '" + u0 + "'");
  }
  if (const auto scale = take("u0.scale")) {
    c.data.guillemin_scale = parse_real(trim(*scale), "u0.scale");
    if (!(c.data.guillemin_scale > 0.0)) throw ConfigError("u0.scale", "must be positive");
  }

  c.data.axes.assign(n, toric::AxisSpec{});
  bool any_velocity = false;
  for (auto it = entries.begin(); it != entries.end();) {
    const auto& key = it->first;
    const auto& value = it->second.value;
    if (const auto ax = axis_of(key, "u0.F")) {
      if (*ax >= n || (n > 1 && key == "u0.F")) throw ConfigError(key, "axis does not match dimension");
      if (c.data.potential != toric::PotentialKind::guillemin_plus_smooth)
        throw ConfigError(key, "smooth part requires u0 = guillemin_plus_smooth");
      c.data.axes[*ax].smooth_part = toric::Polynomial(parse_reals(value, key));
    } else if (const auto axv = axis_of(key, "udot0")) {
      if (*axv >= n || (n > 1 && key == "udot0")) throw ConfigError(key, "axis does not match dimension");
      auto& spec = c.data.axes[*axv];
      if (trim(value) == "fubini_study_quadratic") {
        spec.velocity_kind = toric::VelocityKind::fubini_study_quadratic;
      } else {
        spec.velocity_kind = toric::VelocityKind::polynomial;
        spec.velocity = toric::Polynomial(parse_reals(value, key));
      }
      any_velocity = true;
    } else if (key == "moment_nodes") {
      c.moment_nodes = parse_size(value, key);
    } else if (key == "x_nodes") {
      c.x_nodes = parse_size(value, key);
    } else if (key == "s_mesh") {
      c.s_mesh = parse_size(value, key);
    } else if (key == "raster") {
      c.raster = parse_size(value, key);
    } else if (key == "T") {
      c.T = parse_real(trim(value), key);
    } else {
      throw ConfigError(key, "unknown key");
    }
    it = entries.erase(it);
  }
  if (!any_velocity) throw ConfigError("udot0", "required");

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace hrma::report
