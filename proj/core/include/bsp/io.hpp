#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "bsp/geometry.hpp"
#include "bsp/likelihood.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/relational.hpp"

namespace bsp::io {

using nlohmann::json;

// {"vertices": [[x, y], ...]} in counter-clockwise order.
json to_json(const ConvexPolygon& poly);
ConvexPolygon polygon_from_json(const json& j);

// {"theta": t, "offset": o}
json to_json(const CutLine& cut);
CutLine cut_from_json(const json& j);

// {"domain": <polygon>, "budget": t, "events": [{"time", "block_id", "cut"}...]}
json to_json(const BspTree& tree);
BspTree tree_from_json(const json& j);

// {"kind": "uniform"} | {"kind": "axis"} |
// {"kind": "mixed", "components": [{"kind": ..., "c": ...}, ...]}
json to_json(const DirectionWeight& w);
DirectionWeight weight_from_json(const json& j);

// Parses JSON text, reporting syntax errors as kParse.
json parse_json(std::string_view text, std::string_view source);

// Deterministic serialisation used for every file the tools write.
std::string dump(const json& j);

// SVG drawing of the leaves: one path per leaf, fill colour derived from a
// hash of the block id, and a legend of block ids.
std::string to_svg(const BspTree& tree, double size = 512.0);

// Edge list: a header line "n <N>" followed by one "i j" pair per line for
// every R_ij = 1. Blank lines and lines starting with '#' are ignored.
// Errors name the offending line.
RelationalDataset read_edge_list(std::istream& in, std::string_view source);
// Marks the listed entries as test entries. The header must repeat n.
void read_mask(std::istream& in, std::string_view source, RelationalDataset& dataset);
std::string write_edge_list(const RelationalDataset& dataset);
std::string write_mask(const RelationalDataset& dataset);

// CSV "i,j,score,label,split" over every non-missing entry.
std::string predictions_csv(const RelationalDataset& dataset, std::span<const double> scores);

// CSV "x,y,label".
std::string points_csv(const LabelledPoints& data);
LabelledPoints read_points_csv(std::istream& in, std::string_view source,
                               std::uint32_t num_labels);

// 64-bit FNV-1a, used for content-addressed file names.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Shortest round-trip text for a double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace bsp::io
