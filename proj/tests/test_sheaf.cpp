#include <gtest/gtest.h>

#include "msf/document.hpp"
#include "msf/sheaf.hpp"
#include "support.hpp"

using namespace msf;
using msf::test::fixture_json;
using msf::test::from_json;
using msf::test::load_fixture;
using msf::test::points;

namespace {

Section named(const MetricSheaf& m, const std::string& n) { return *m.named_section(n); }

std::string first_failure(const nlohmann::json& doc) {
  const auto rep = validate_sheaf(from_json(doc));
  return rep.first_failure() ? rep.first_failure()->clause : "";
}

}  // namespace

TEST(Sheaf, FixturesValidate) {
  for (const auto& name : test::all_fixtures()) {
    const auto rep = validate_sheaf(load_fixture(name));
    EXPECT_TRUE(rep.ok()) << name << ": " << (rep.first_failure() ? rep.first_failure()->witness : "");
    EXPECT_EQ(rep.clauses.size(), 11u);
  }
}

TEST(Sheaf, SeededMutationsNameTheirClause) {
  for (const auto& mut : test::seeded_mutations()) {
    const auto rep = validate_sheaf(from_json(mut.doc));
    ASSERT_NE(rep.first_failure(), nullptr) << mut.name;
    EXPECT_EQ(rep.first_failure()->clause, mut.clause) << mut.name;
    EXPECT_FALSE(rep.first_failure()->witness.empty());
    EXPECT_THROW(rep.throw_if_failed(), ValidationFailure);
  }
}

TEST(Sheaf, ModulusComplianceFailure) {
  auto doc = fixture_json("disc");
  doc["moduli"]["R"]["delta"][0] = "1";
  EXPECT_EQ(first_failure(doc), "modulus compliance");
}

TEST(Sheaf, MissingModulusFailsPositivity) {
  auto doc = fixture_json("disc");
  doc.erase("moduli");
  EXPECT_EQ(first_failure(doc), "modulus positivity");
}

TEST(Sheaf, DiscontinuousRelation) {
  auto doc = fixture_json("indisc");
  doc["fibers"]["b"]["relations"]["R"]["z"] = "1/2";
  EXPECT_EQ(first_failure(doc), "continuity of relations");
}

TEST(Sheaf, ProjectionNotLocalHomeomorphism) {
  auto doc = fixture_json("indisc");
  doc["etale"]["opens"] = nlohmann::json::parse(R"([["u"], ["v"], ["w"], ["z"]])");
  EXPECT_EQ(first_failure(doc), "local homeomorphism");
}

TEST(Sheaf, EmptyFiberIsStructuralError) {
  auto doc = fixture_json("disc");
  doc["signature"]["constants"] = nlohmann::json::array();
  for (auto p : {"a", "b"}) doc["fibers"][p].erase("constants");
  doc["base"]["points"].push_back("c");
  doc["base"]["opens"] = nlohmann::json::parse(
      R"([[], ["a"], ["b"], ["c"], ["a","b"], ["a","c"], ["b","c"], ["a","b","c"]])");
  doc["fibers"]["c"] = nlohmann::json::parse(R"({"metric": {}})");
  EXPECT_THROW(from_json(doc), DocumentError);
}

TEST(Sheaf, FunctionLeavingFiberIsStructuralError) {
  auto doc = fixture_json("cyc");
  doc["fibers"]["q0"]["functions"]["mult"]["q0_1,q0_1"] = "q1_2";
  EXPECT_THROW(from_json(doc), DocumentError);
}

TEST(Sheaf, SectionCounts) {
  const auto disc = load_fixture("disc");
  EXPECT_EQ(disc.sections(points({0})).size(), 2u);
  EXPECT_EQ(disc.sections(points({1})).size(), 2u);
  EXPECT_EQ(disc.sections(points({0, 1})).size(), 4u);
  EXPECT_EQ(disc.sections(PointSet{}).size(), 1u);
  const auto indisc = load_fixture("indisc");
  EXPECT_EQ(indisc.sections(points({0, 1})).size(), 2u);
  EXPECT_THROW(indisc.sections(points({0})), NotOpen);
  const auto sier = load_fixture("sierpinski");
  EXPECT_EQ(sier.sections(points({0})).size(), 1u);
  EXPECT_EQ(sier.sections(points({0, 1})).size(), 1u);
  const auto cyc = load_fixture("cyc");
  EXPECT_EQ(cyc.sections(cyc.base().full()).size(), 4096u);
}

TEST(Sheaf, SectionsAreSections) {
  for (const auto& name : test::all_fixtures()) {
    const auto m = load_fixture(name);
    for (PointSet u : m.base().opens()) {
      for (const Section& s : m.sections(u)) {
        EXPECT_EQ(s.domain, u);
        EXPECT_TRUE(m.is_section(s.image) || s.image.empty());
        for (PointId x : u) EXPECT_EQ(m.proj(m.value(s, x)), x);
      }
    }
  }
}

TEST(Sheaf, ValuesAndConstants) {
  const auto m = load_fixture("disc");
  const Section uw = named(m, "uw");
  EXPECT_EQ(m.element_name(m.value(uw, PointId(0))), "u");
  EXPECT_EQ(m.element_name(m.value(uw, PointId(1))), "w");
  EXPECT_EQ(m.constant("c"), uw);
  EXPECT_EQ(m.describe(uw), "u+w");
  EXPECT_EQ(m.describe(points({0, 1})), "{a,b}");
  EXPECT_EQ(m.dist(*m.find_element("w"), *m.find_element("z")), Rational(1, 3));
}

TEST(Sheaf, Restriction) {
  const auto m = load_fixture("disc");
  const Section r = m.restrict(named(m, "vz"), points({0}));
  EXPECT_EQ(m.describe(r), "v");
  EXPECT_EQ(r.domain, points({0}));
  EXPECT_THROW(m.restrict(r, points({0, 1})), Error);
  const auto ind = load_fixture("indisc");
  EXPECT_THROW(ind.restrict(named(ind, "uw"), points({0})), NotOpen);
}

TEST(Sheaf, FunctionApplication) {
  const auto m = load_fixture("cyc");
  const Section k3 = m.apply_function("mult", {named(m, "k1"), named(m, "k2")});
  EXPECT_EQ(k3, named(m, "k3"));
  const Section wrap = m.apply_function("mult", {named(m, "k5"), named(m, "k7")});
  EXPECT_EQ(wrap, named(m, "k4"));
  EXPECT_THROW(m.apply_function("mult", {named(m, "k1")}), ArityMismatch);
  EXPECT_THROW(m.apply_function("nope", {}), ArityMismatch);
  const Section part = m.restrict(named(m, "k1"), points({0}));
  EXPECT_THROW(m.apply_function("mult", {part, named(m, "k1")}), Error);
}

TEST(Sheaf, UnknownRelation) {
  EXPECT_THROW(load_fixture("disc").relation_id("S"), ArityMismatch);
}
