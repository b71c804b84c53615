#include <doctest.h>

#include <functional>
#include <sstream>
#include <string>

#include "bsp/error.hpp"
#include "bsp/io.hpp"
#include "bsp/relational.hpp"

using namespace bsp;

namespace {

ErrorKind kind_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInvalidArgument;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("tree JSON round trip is exact") {
    Rng rng(71);
    const ConvexPolygon hex({{0, 0}, {2, 0}, {3, 1}, {2, 2}, {0, 2}, {-1, 1}});
    for (int k = 0; k < 20; ++k) {
      const BspTree t = sample_bsp(hex, 3.0, DirectionWeight::uniform(), rng);
      const std::string text = io::dump(io::to_json(t));
      const BspTree back = io::tree_from_json(io::parse_json(text, "tree"));
      CHECK(back == t);
      CHECK(io::dump(io::to_json(back)) == text);
    }
  }

  TEST_CASE("weight JSON round trip") {
    const DirectionWeight mixed =
        DirectionWeight::mixed({{DirectionWeight::uniform(), 1.0}, {DirectionWeight::axis_aligned(), 2.0}});
    for (const DirectionWeight& w : {DirectionWeight::uniform(), DirectionWeight::axis_aligned(), mixed}) {
      const auto j = io::to_json(w);
      CHECK(io::to_json(io::weight_from_json(j)) == j);
    }
    const auto custom = DirectionWeight::custom([](double) { return 1.0; }, 1.0);
    CHECK(kind_of([&] { io::to_json(custom); }) == ErrorKind::kInvalidArgument);
  }

  TEST_CASE("malformed input is a parse error") {
    CHECK(kind_of([] { io::parse_json("{\"a\": ", "x.json"); }) == ErrorKind::kParse);
    CHECK(kind_of([] { io::tree_from_json(io::parse_json("{\"budget\": 1}", "t")); }) ==
          ErrorKind::kParse);
  }

  TEST_CASE("edge list and mask round trip") {
    Rng rng(72);
    PlantedRelational pl = generate_relational(15, 2.0, DirectionWeight::uniform(), 0.5, 0.5, rng);
    hold_out(pl.dataset, 0.2, rng);
    std::istringstream edges(io::write_edge_list(pl.dataset));
    RelationalDataset back = io::read_edge_list(edges, "edges.txt");
    std::istringstream mask(io::write_mask(pl.dataset));
    io::read_mask(mask, "mask.txt", back);
    CHECK(back.n == pl.dataset.n);
    CHECK(back.entries == pl.dataset.entries);
    CHECK(back.mask == pl.dataset.mask);
  }

  TEST_CASE("edge-list errors name the line") {
    std::string msg;
    std::istringstream bad("n 4\n0 1\n# comment\n2 x\n");
    CHECK(kind_of([&] { io::read_edge_list(bad, "g.txt"); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("g.txt:4") != std::string::npos);
    std::istringstream range("n 3\n0 3\n");
    CHECK(kind_of([&] { io::read_edge_list(range, "g.txt"); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("g.txt:2") != std::string::npos);
    std::istringstream header("0 1\n");
    CHECK(kind_of([&] { io::read_edge_list(header, "g.txt"); }) == ErrorKind::kParse);
  }

  TEST_CASE("points CSV round trip") {
    LabelledPoints d;
    d.num_labels = 3;
    d.points = {{0.1, 0.2}, {1.0 / 3.0, 0.7}, {0.9, 1e-17}};
    d.labels = {0, 2, 1};
    std::istringstream in(io::points_csv(d));
    const LabelledPoints back = io::read_points_csv(in, "p.csv", 3);
    CHECK(back.points == d.points);
    CHECK(back.labels == d.labels);
    std::istringstream bad("x,y,label\n0.1,0.2,5\n");
    CHECK(kind_of([&] { io::read_points_csv(bad, "p.csv", 3); }) == ErrorKind::kParse);
  }

  TEST_CASE("number formatting and hashing") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
      CHECK(std::stod(io::format_double(v)) == v);
    }
    // Published FNV-1a 64-bit test vectors.
    CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(io::hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("SVG has one path per leaf") {
    Rng rng(73);
    const BspTree t = sample_bsp(ConvexPolygon::unit_square(), 4.0, DirectionWeight::uniform(), rng);
    const std::string svg = io::to_svg(t);
    CHECK(count(svg, "<path ") == t.num_leaves());
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(io::to_svg(t) == svg);
  }
}
