#include <gtest/gtest.h>

#include "msf/document.hpp"
#include "support.hpp"

using namespace msf;
using msf::test::fixture_json;
using msf::test::points;

TEST(Document, LoadsFixtures) {
  const auto m = test::load_fixture("disc");
  EXPECT_EQ(m.num_points(), 2u);
  EXPECT_EQ(m.num_elements(), 4u);
  EXPECT_EQ(m.point_name(PointId(1)), "b");
  EXPECT_EQ(m.spec().moduli.at("R").delta.size(), 3u);
}

TEST(Document, MissingFile) { EXPECT_THROW(load_document("/nonexistent/x.msf"), DocumentError); }

TEST(Document, MalformedJson) {
  EXPECT_THROW(parse_document(nlohmann::json::parse("[1, 2]")), DocumentError);
}

TEST(Document, MissingKeys) {
  for (const char* key : {"signature", "base", "etale", "fibers"}) {
    auto doc = fixture_json("disc");
    doc.erase(key);
    EXPECT_THROW(parse_document(doc), DocumentError) << key;
  }
}

TEST(Document, UnknownNames) {
  auto doc = fixture_json("disc");
  doc["etale"]["proj"]["u"] = "q";
  EXPECT_THROW(parse_document(doc), DocumentError);
  doc = fixture_json("disc");
  doc["fibers"]["a"]["relations"]["R"]["nope"] = "0";
  EXPECT_THROW(parse_document(doc), DocumentError);
}

TEST(Document, BadRational) {
  auto doc = fixture_json("disc");
  doc["fibers"]["a"]["metric"]["u"]["v"] = "1/0";
  EXPECT_THROW(parse_document(doc), DocumentError);
  doc["fibers"]["a"]["metric"]["u"]["v"] = 0.5;
  EXPECT_THROW(parse_document(doc), DocumentError);
}

TEST(Document, MissingConstantValue) {
  auto doc = fixture_json("disc");
  doc["fibers"]["b"].erase("constants");
  EXPECT_THROW(parse_document(doc), DocumentError);
}

TEST(Document, IntegersAreRationals) {
  auto doc = fixture_json("disc");
  doc["fibers"]["a"]["relations"]["R"]["v"] = 1;
  EXPECT_EQ(parse_document(doc).relations.at("R").size(), 4u);
}

TEST(Document, PointSets) {
  const auto m = test::load_fixture("disc");
  EXPECT_EQ(parse_point_set(m, "X"), points({0, 1}));
  EXPECT_EQ(parse_point_set(m, "EMPTY"), PointSet{});
  EXPECT_EQ(parse_point_set(m, "b"), points({1}));
  EXPECT_EQ(parse_point_set(m, "a+b"), points({0, 1}));
  EXPECT_EQ(parse_point_set(m, "{a,b}"), points({0, 1}));
  EXPECT_EQ(parse_point_set(m, m.describe(points({1}))), points({1}));
  EXPECT_EQ(parse_point_set(m, "{}"), PointSet{});
  EXPECT_THROW(parse_point_set(m, "q"), DocumentError);
}

TEST(Document, Sections) {
  const auto m = test::load_fixture("disc");
  EXPECT_EQ(m.describe(parse_section(m, "uz")), "u+z");
  EXPECT_EQ(parse_section(m, "c"), m.constant("c"));
  EXPECT_EQ(m.describe(parse_section(m, "v+w")), "v+w");
  EXPECT_EQ(parse_section(m, "z").domain, points({1}));
  EXPECT_THROW(parse_section(m, "u+v"), DocumentError);
  EXPECT_THROW(parse_section(m, "q"), DocumentError);
  const auto ind = test::load_fixture("indisc");
  EXPECT_THROW(parse_section(ind, "u"), DocumentError);
}

TEST(Document, UltrafilterNames) {
  const auto m = test::load_fixture("disc");
  const auto fs = enumerate_regular_ultrafilters(m.base());
  ASSERT_EQ(fs.size(), 2u);
  EXPECT_EQ(ultrafilter_name(m, fs[0]), "at:a");
  EXPECT_EQ(ultrafilter_name(m, fs[1]), "at:b");
  EXPECT_EQ(resolve_ultrafilter(m, "at:b").members(), fs[1].members());
  EXPECT_THROW(resolve_ultrafilter(m, "b"), DocumentError);
  EXPECT_THROW(resolve_ultrafilter(m, "at:q"), DocumentError);
  const auto ind = test::load_fixture("indisc");
  EXPECT_EQ(ultrafilter_name(ind, resolve_ultrafilter(ind, "at:b")), "at:a");
}
