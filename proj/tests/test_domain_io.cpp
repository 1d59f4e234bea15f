#include <filesystem>
#include <sstream>
#include <variant>

#include <gtest/gtest.h>

#include "hsfem/domain_io.hpp"
#include "hsfem/error.hpp"

using namespace hsfem;

TEST(DomainSpec, ParsesBuiltins) {
  EXPECT_TRUE(std::holds_alternative<RectangleShape>(parse_domain_spec("square")));
  const auto r = std::get<RectangleShape>(parse_domain_spec("rectangle:2,0.5"));
  EXPECT_EQ(r.width, 2.0);
  EXPECT_EQ(r.height, 0.5);
  EXPECT_EQ(std::get<DiskShape>(parse_domain_spec("disk:1.5")).radius, 1.5);
  const auto e = std::get<EllipseShape>(parse_domain_spec("ellipse:2,1"));
  EXPECT_EQ(e.semi_x, 2.0);
  EXPECT_EQ(e.semi_y, 1.0);
  const auto p = std::get<PolygonShape>(parse_domain_spec("polygon:lip_triangle"));
  ASSERT_EQ(p.vertices.size(), 3u);
  EXPECT_EQ(p.vertices[2], Vec2(0.5, 0.45));
}

TEST(DomainSpec, RejectsMalformedSpecs) {
  for (const char* bad : {"", "triangle", "disk:", "disk:-1", "disk:1x", "ellipse:2", "rectangle:1,2,3",
                          "polygon:", "polygon:nonexistent_shape_file", "file:"})
    EXPECT_THROW(parse_domain_spec(bad), ParseError) << bad;
}

TEST(DomainDescription, ReportsLineNumbers) {
  std::istringstream in("polygon\n0 0\n# comment\n1 zero\n");
  try {
    parse_domain_description(in, "shape.txt");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("shape.txt:4"), std::string::npos) << e.what();
  }
  std::istringstream empty("# nothing\n\n");
  EXPECT_THROW(parse_domain_description(empty), ParseError);
}

TEST(DomainDescription, PolygonRoundTripIsBitExact) {
  const PolygonShape shape{{{0.0, 0.0}, {1.0 / 3.0, 0.1}, {0.7, std::sqrt(2.0) / 3.0}}, "poly"};
  std::stringstream s;
  write_domain_description(s, shape);
  const auto back = std::get<PolygonShape>(parse_domain_description(s));
  ASSERT_EQ(back.vertices.size(), shape.vertices.size());
  for (std::size_t i = 0; i < shape.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], shape.vertices[i]);
}

TEST(DomainDescription, FileSpec) {
  const auto path = std::filesystem::temp_directory_path() / "hsfem_test_domain.txt";
  write_domain_file(path, EllipseShape{3.0, 1.0});
  const auto e = std::get<EllipseShape>(parse_domain_spec("file:" + path.string()));
  EXPECT_EQ(e.semi_x, 3.0);
  std::filesystem::remove(path);
  EXPECT_THROW(read_domain_file(path), ParseError);
}
