#include "dppbound/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dppbound {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InputError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  return v;
}

std::vector<std::string> coordinate_header(Index dim) {
  std::vector<std::string> out;
  for (Index d = 0; d < dim; ++d) out.push_back("x" + std::to_string(d + 1));
  return out;
}

Index parse_coordinate_header(const std::vector<std::string>& cells, std::size_t first, const std::string& what) {
  if (cells.size() <= first) throw InputError(what + ": header has no coordinate columns");
  for (std::size_t i = first; i < cells.size(); ++i)
    if (cells[i] != "x" + std::to_string(i - first + 1))
      throw InputError(what + ": expected column 'x" + std::to_string(i - first + 1) + "', found '" + cells[i] + "'");
  return static_cast<Index>(cells.size() - first);
}

}  // namespace

std::string format_point_patterns(const PointPatterns& p) {
  std::ostringstream os;
  os << "sample_id";
  for (const auto& h : coordinate_header(p.dim)) os << ',' << h;
  os << '\n';
  if (p.ids.size() != p.patterns.size()) throw InputError("point patterns: ids and patterns differ in count");
  for (std::size_t t = 0; t < p.patterns.size(); ++t) {
    const PointSet& ps = p.patterns[t];
    if (ps.dim() != p.dim) throw InputError("point patterns: dimension mismatch");
    if (p.ids[t].empty() || p.ids[t].find_first_of(",\n\r") != std::string::npos)
      throw InputError("point patterns: sample id must be nonempty without commas or newlines");
    for (Index i = 0; i < ps.size(); ++i) {
      os << p.ids[t];
      for (Index d = 0; d < p.dim; ++d) os << ',' << format_double(ps(i, d));
      os << '\n';
    }
  }
  return os.str();
}

PointPatterns parse_point_patterns(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputError("point patterns: empty file");
  const auto head = split_line(lines[0]);
  if (head.empty() || head[0] != "sample_id") throw InputError("point patterns: header must start with 'sample_id'");
  PointPatterns out;
  out.dim = parse_coordinate_header(head, 1, "point patterns");
  std::map<std::string, std::size_t> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split_line(lines[k]);
    if (static_cast<Index>(cells.size()) != out.dim + 1)
      throw InputError("point patterns: line " + std::to_string(k + 1) + " has the wrong number of columns");
    const std::string& id = cells[0];
    if (id.empty()) throw InputError("point patterns: line " + std::to_string(k + 1) + " has an empty sample_id");
    Vector x(out.dim);
    for (Index d = 0; d < out.dim; ++d) {
      x(d) = parse_cell(cells[static_cast<std::size_t>(d + 1)], k + 1);
      if (!std::isfinite(x(d))) throw InputError("point patterns: non-finite coordinate on line " + std::to_string(k + 1));
    }
    const auto it = seen.find(id);
    if (it == seen.end()) {
      seen.emplace(id, out.ids.size());
      out.ids.push_back(id);
      out.patterns.emplace_back(out.dim);
    } else if (it->second + 1 != out.ids.size()) {
      throw InputError("point patterns: rows of sample '" + id + "' are not contiguous");
    }
    out.patterns.back().append(x);
  }
  return out;
}

void write_point_patterns(const std::string& path, const PointPatterns& p) {
  write_file_atomic(path, format_point_patterns(p));
}

PointPatterns read_point_patterns(const std::string& path) { return parse_point_patterns(read_file(path)); }

std::string format_ground_set(const PointSet& items) {
  std::ostringstream os;
  const auto head = coordinate_header(items.dim());
  for (std::size_t i = 0; i < head.size(); ++i) os << (i ? "," : "") << head[i];
  os << '\n';
  for (Index i = 0; i < items.size(); ++i) {
    for (Index d = 0; d < items.dim(); ++d) os << (d ? "," : "") << format_double(items(i, d));
    os << '\n';
  }
  return os.str();
}

PointSet read_ground_set(const std::string& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty()) throw InputError("ground set: empty file");
  const Index dim = parse_coordinate_header(split_line(lines[0]), 0, "ground set");
  PointSet out(dim);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split_line(lines[k]);
    if (static_cast<Index>(cells.size()) != dim)
      throw InputError("ground set: line " + std::to_string(k + 1) + " has the wrong number of columns");
    Vector x(dim);
    for (Index d = 0; d < dim; ++d) {
      x(d) = parse_cell(cells[static_cast<std::size_t>(d)], k + 1);
      if (!std::isfinite(x(d))) throw InputError("ground set: non-finite coordinate on line " + std::to_string(k + 1));
    }
    out.append(x);
  }
  if (out.empty()) throw InputError("ground set: no items");
  return out;
}

FiniteDataset finite_dataset_from_patterns(const PointSet& ground, const PointPatterns& p) {
  if (p.dim != ground.dim()) throw InputError("finite data: patterns and ground set differ in dimension");
  std::map<std::vector<double>, Index> index;
  for (Index i = 0; i < ground.size(); ++i) {
    std::vector<double> key(static_cast<std::size_t>(ground.dim()));
    for (Index d = 0; d < ground.dim(); ++d) key[static_cast<std::size_t>(d)] = ground(i, d);
    if (!index.emplace(key, i).second) throw InputError("finite data: ground set has duplicate items");
  }
  std::vector<FinitePattern> patterns;
  for (const auto& ps : p.patterns) {
    std::vector<Index> idx;
    for (Index i = 0; i < ps.size(); ++i) {
      std::vector<double> key(static_cast<std::size_t>(ps.dim()));
      for (Index d = 0; d < ps.dim(); ++d) key[static_cast<std::size_t>(d)] = ps(i, d);
      const auto it = index.find(key);
      if (it == index.end()) throw InputError("finite data: a pattern point is not a ground item");
      idx.push_back(it->second);
    }
    patterns.emplace_back(std::move(idx));
  }
  return FiniteDataset(GroundSet(ground), std::move(patterns));
}

PointPatterns patterns_from_finite(const FiniteDataset& data) {
  PointPatterns out;
  out.dim = data.ground.dim();
  for (std::size_t t = 0; t < data.patterns.size(); ++t) {
    out.ids.push_back(std::to_string(t + 1));
    out.patterns.push_back(data.ground.items().subset(data.patterns[t].indices()));
  }
  return out;
}

std::string format_chain_csv(const ChainTrace& trace) {
  std::ostringstream os;
  const std::size_t p = trace.names.size();
  os << "iter";
  for (std::size_t i = 0; i < p; ++i) os << ",theta_" << i + 1;
  os << ",accepted,u,logalpha_lo,logalpha_hi,m_cur,m_prop,refinements,fallback_flag\n";
  for (const auto& r : trace.records) {
    os << r.iter;
    for (Index i = 0; i < r.theta.size(); ++i) os << ',' << format_double(r.theta(i));
    os << ',' << (r.accepted ? 1 : 0) << ',' << format_double(r.u) << ',' << format_double(r.logalpha_lo) << ','
       << format_double(r.logalpha_hi) << ',' << r.m_cur << ',' << r.m_prop << ',' << r.refinements << ','
       << (r.fallback ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string format_bounds_csv(const std::vector<SweepRow>& rows, const std::vector<std::optional<double>>& exact) {
  std::ostringstream os;
  os << "m,lower,upper,gap,exact,seconds\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << r.m << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ',' << format_double(r.gap()) << ',';
    if (i < exact.size() && exact[i]) os << format_double(*exact[i]);
    os << ',' << format_double(r.seconds) << '\n';
  }
  return os.str();
}

std::string format_summary(const Summary& s) {
  std::ostringstream os;
  for (const auto& [k, v] : s) os << k << " = " << v << '\n';
  return os.str();
}

Summary parse_summary(const std::string& text) {
  Summary out;
  for (const auto& line : lines_of(text)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw InputError("summary: line without ' = '");
    out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return out;
}

Index NumericTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Index>(i);
  throw InputError("table: no column '" + name + "'");
}

NumericTable parse_numeric_csv(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputError("table: empty file");
  NumericTable out;
  out.header = split_line(lines[0]);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split_line(lines[k]);
    if (cells.size() != out.header.size())
      throw InputError("table: line " + std::to_string(k + 1) + " has the wrong number of columns");
    std::vector<double> row;
    for (const auto& c : cells) {
      if (c.empty() || c == "nan") row.push_back(std::numeric_limits<double>::quiet_NaN());
      else if (c == "inf") row.push_back(std::numeric_limits<double>::infinity());
      else if (c == "-inf") row.push_back(-std::numeric_limits<double>::infinity());
      else row.push_back(parse_cell(c, k + 1));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace dppbound
