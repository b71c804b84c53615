#include "bsp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "bsp/error.hpp"

namespace bsp::io {
namespace {

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

double number(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    fail(ErrorKind::kParse, std::string("expected numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Splits a line into whitespace-separated tokens.
std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::size_t parse_index(const std::string& tok, std::string_view source, std::size_t line) {
  std::size_t v = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) parse_error(source, line, "not an integer: '" + tok + "'");
  return v;
}

std::size_t read_header(std::istream& in, std::string_view source, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto t = tokens(line);
    if (t.size() != 2 || t[0] != "n") parse_error(source, line_no, "expected header 'n <N>'");
    return parse_index(t[1], source, line_no);
  }
  parse_error(source, line_no, "missing header 'n <N>'");
}

template <typename Fn>
void read_pairs(std::istream& in, std::string_view source, std::size_t n, std::size_t& line_no,
                Fn&& fn) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto t = tokens(line);
    if (t.size() != 2) parse_error(source, line_no, "expected 'i j'");
    const std::size_t i = parse_index(t[0], source, line_no);
    const std::size_t j = parse_index(t[1], source, line_no);
    if (i >= n || j >= n) parse_error(source, line_no, "node index out of range");
    fn(i, j);
  }
}

}  // namespace

json to_json(const ConvexPolygon& poly) {
  json v = json::array();
  for (const Point2& p : poly.vertices()) v.push_back({p.x, p.y});
  return {{"vertices", std::move(v)}};
}

ConvexPolygon polygon_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.at("vertices").is_array()) {
    fail(ErrorKind::kParse, "polygon needs a 'vertices' array");
  }
  std::vector<Point2> pts;
  for (const json& v : j.at("vertices")) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(ErrorKind::kParse, "vertex must be [x, y]");
    }
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ConvexPolygon(std::move(pts));
}

json to_json(const CutLine& cut) { return {{"theta", cut.theta}, {"offset", cut.offset}}; }

CutLine cut_from_json(const json& j) { return {number(j, "theta"), number(j, "offset")}; }

json to_json(const BspTree& tree) {
  json events = json::array();
  for (const CutEvent& e : tree.events()) {
    events.push_back({{"time", e.time}, {"block_id", e.block_id}, {"cut", to_json(e.cut)}});
  }
  return {{"domain", to_json(tree.domain())}, {"budget", tree.budget()}, {"events", events}};
}

BspTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("events") ||
      !j.at("events").is_array()) {
    fail(ErrorKind::kParse, "tree needs 'domain', 'budget' and 'events'");
  }
  std::vector<CutEvent> events;
  for (const json& e : j.at("events")) {
    if (!e.is_object() || !e.contains("block_id") || !e.at("block_id").is_number_unsigned() ||
        !e.contains("cut")) {
      fail(ErrorKind::kParse, "event needs 'time', 'block_id' and 'cut'");
    }
    events.push_back({number(e, "time"), e.at("block_id").get<BlockId>(), cut_from_json(e.at("cut"))});
  }
  return BspTree::replay(polygon_from_json(j.at("domain")), number(j, "budget"), events);
}

json to_json(const DirectionWeight& w) {
  switch (w.kind()) {
    case DirectionWeight::Kind::kUniform: return {{"kind", "uniform"}};
    case DirectionWeight::Kind::kAxisAligned: return {{"kind", "axis"}};
    case DirectionWeight::Kind::kCustom:
      fail(ErrorKind::kInvalidArgument, "custom weights have no JSON form");
    case DirectionWeight::Kind::kMixed: {
      json comps = json::array();
      for (const MixtureComponent& m : w.components()) {
        json c = to_json(m.weight);
        c["c"] = m.c;
        comps.push_back(std::move(c));
      }
      return {{"kind", "mixed"}, {"components", std::move(comps)}};
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown weight kind");
}

DirectionWeight weight_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    fail(ErrorKind::kParse, "weight needs a 'kind' string");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return DirectionWeight::uniform();
  if (kind == "axis") return DirectionWeight::axis_aligned();
  if (kind == "mixed") {
    if (!j.contains("components") || !j.at("components").is_array()) {
      fail(ErrorKind::kParse, "mixed weight needs a 'components' array");
    }
    std::vector<MixtureComponent> comps;
    for (const json& c : j.at("components")) {
      comps.push_back({weight_from_json(c), number(c, "c")});
    }
    return DirectionWeight::mixed(std::move(comps));
  }
  fail(ErrorKind::kParse, "unknown weight kind '" + kind + "'");
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, std::string(source) + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string to_svg(const BspTree& tree, double size) {
  const auto verts = tree.domain().vertices();
  double x0 = verts[0].x, x1 = verts[0].x, y0 = verts[0].y, y1 = verts[0].y;
  for (const Point2& p : verts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double scale = size / std::max(x1 - x0, y1 - y0);
  const double width = (x1 - x0) * scale;
  const double height = (y1 - y0) * scale;
  const auto ids = tree.leaf_ids();
  const double legend_row = 14.0;
  const double legend_width = 120.0;
  const double total_height = std::max(height, legend_row * static_cast<double>(ids.size() + 1));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width + legend_width)
      << "\" height=\"" << fixed(total_height) << "\">\n";
  auto colour = [](BlockId id) {
    const std::uint64_t h = fnv1a(std::to_string(id));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<unsigned>(64 + (h & 0x7f)),
                  static_cast<unsigned>(64 + ((h >> 8) & 0x7f)),
                  static_cast<unsigned>(64 + ((h >> 16) & 0x7f)));
    return std::string(buf);
  };
  for (BlockId id : ids) {
    out << "  <path id=\"block-" << id << "\" d=\"";
    bool first = true;
    for (const Point2& p : tree.polygon(id).vertices()) {
      out << (first ? "M " : " L ") << fixed((p.x - x0) * scale) << ' '
          << fixed((y1 - p.y) * scale);
      first = false;
    }
    out << " Z\" fill=\"" << colour(id) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  }
  out << "  <g font-family=\"monospace\" font-size=\"10\">\n";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const double y = legend_row * static_cast<double>(k + 1);
    out << "    <rect x=\"" << fixed(width + 8) << "\" y=\"" << fixed(y - 9) << "\" width=\"10\""
        << " height=\"10\" fill=\"" << colour(ids[k]) << "\"/>\n";
    out << "    <text x=\"" << fixed(width + 22) << "\" y=\"" << fixed(y) << "\">block "
        << ids[k] << "</text>\n";
  }
  out << "  </g>\n</svg>\n";
  return out.str();
}

RelationalDataset read_edge_list(std::istream& in, std::string_view source) {
  std::size_t line_no = 0;
  const std::size_t n = read_header(in, source, line_no);
  if (n < 2) parse_error(source, line_no, "n must be at least 2");
  RelationalDataset ds;
  ds.n = n;
  ds.entries.assign(n * n, 0);
  ds.mask.assign(n * n, EntryRole::kTrain);
  read_pairs(in, source, n, line_no, [&](std::size_t i, std::size_t j) { ds.entries[i * n + j] = 1; });
  return ds;
}

void read_mask(std::istream& in, std::string_view source, RelationalDataset& ds) {
  std::size_t line_no = 0;
  const std::size_t n = read_header(in, source, line_no);
  if (n != ds.n) parse_error(source, line_no, "mask node count differs from the data");
  read_pairs(in, source, n, line_no,
             [&](std::size_t i, std::size_t j) { ds.mask[i * n + j] = EntryRole::kTest; });
}

std::string write_edge_list(const RelationalDataset& ds) {
  std::ostringstream out;
  out << "n " << ds.n << "\n";
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      if (ds.at(i, j)) out << i << ' ' << j << "\n";
    }
  }
  return out.str();
}

std::string write_mask(const RelationalDataset& ds) {
  std::ostringstream out;
  out << "n " << ds.n << "\n";
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      if (ds.role(i, j) == EntryRole::kTest) out << i << ' ' << j << "\n";
    }
  }
  return out.str();
}

std::string predictions_csv(const RelationalDataset& ds, std::span<const double> scores) {
  std::ostringstream out;
  out << "i,j,score,label,split\n";
  for (std::size_t i = 0; i < ds.n; ++i) {
    for (std::size_t j = 0; j < ds.n; ++j) {
      const EntryRole role = ds.role(i, j);
      if (role == EntryRole::kMissing) continue;
      out << i << ',' << j << ',' << format_double(scores[i * ds.n + j]) << ','
          << static_cast<int>(ds.at(i, j)) << ',' << (role == EntryRole::kTrain ? "train" : "test")
          << "\n";
    }
  }
  return out.str();
}

std::string points_csv(const LabelledPoints& data) {
  std::ostringstream out;
  out << "x,y,label\n";
  for (std::size_t k = 0; k < data.size(); ++k) {
    out << format_double(data.points[k].x) << ',' << format_double(data.points[k].y) << ','
        << data.labels[k] << "\n";
  }
  return out.str();
}

LabelledPoints read_points_csv(std::istream& in, std::string_view source,
                               std::uint32_t num_labels) {
  LabelledPoints out;
  out.num_labels = num_labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skip_line(line) || (line_no == 1 && line.rfind("x,", 0) == 0)) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      parse_error(source, line_no, "expected 'x,y,label'");
    }
    double x = 0.0, y = 0.0;
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), x);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), y);
    if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() ||
        r2.ptr != b.data() + b.size()) {
      parse_error(source, line_no, "malformed coordinate");
    }
    const std::size_t label = parse_index(c, source, line_no);
    if (label >= num_labels) parse_error(source, line_no, "label out of range");
    out.points.push_back({x, y});
    out.labels.push_back(static_cast<std::uint32_t>(label));
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::kInvalidArgument, "unformattable number");
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::kIo, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace bsp::io
