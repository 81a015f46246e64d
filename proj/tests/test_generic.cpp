#include <gtest/gtest.h>

#include "msf/document.hpp"
#include "msf/generic.hpp"
#include "msf/suites.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace msf;
using msf::test::load_fixture;
using msf::test::points;

namespace {

OpenFilter at(const MetricSheaf& m, const std::string& p) { return resolve_ultrafilter(m, "at:" + p); }

}  // namespace

TEST(Rho, DiscExamples) {
  const auto m = load_fixture("disc");
  const Section uw = parse_section(m, "uw");
  const Section vz = parse_section(m, "vz");
  EXPECT_EQ(rho(m, at(m, "a"), uw, uw), Rational(0));
  EXPECT_EQ(rho(m, at(m, "a"), uw, vz), Rational(1, 2));
  EXPECT_EQ(rho(m, at(m, "b"), uw, vz), Rational(1, 3));
  EXPECT_THROW(rho(m, at(m, "a"), parse_section(m, "w"), uw), EmptyTrace);
}

TEST(Rho, MatchesOracle) {
  for (const auto& name : test::regular_fixtures()) {
    const auto m = load_fixture(name);
    for (const auto& F : enumerate_regular_ultrafilters(m.base())) {
      std::vector<Section> secs;
      for (PointSet u : F.members()) {
        const auto& s = m.sections(u);
        secs.insert(secs.end(), s.begin(), s.begin() + std::min<std::size_t>(s.size(), 12));
      }
      for (const auto& a : secs) {
        for (const auto& b : secs) EXPECT_EQ(rho(m, F, a, b), oracle::rho(m, F, a, b));
      }
    }
  }
}

TEST(Generic, DiscAtA) {
  const auto m = load_fixture("disc");
  const GenericModel G = build_generic(m, at(m, "a"));
  ASSERT_EQ(G.size(), 2u);
  EXPECT_EQ(G.dist(0, 1), Rational(1, 2));
  EXPECT_EQ(G.relation("R", {0}), Rational(0));
  EXPECT_EQ(G.relation("R", {1}), Rational(1));
  EXPECT_EQ(G.constant("c"), 0u);
  EXPECT_FALSE(G.check_well_defined());
  // Matches the fiber over a: u at distance 1/2 from v, R(u) = 0, R(v) = 1.
  for (std::size_t i = 0; i < 2; ++i) {
    const Section& rep = G.universe()[i].representative;
    EXPECT_EQ(G.relation("R", {i}), m.relation(m.relation_id("R"), {m.value(rep, PointId(0))}));
    EXPECT_EQ(G.relation("R", {i}), oracle::induced_unary(m, G.filter(), "R", rep));
  }
}

TEST(Generic, DiscAtB) {
  const auto m = load_fixture("disc");
  const GenericModel G = build_generic(m, at(m, "b"));
  ASSERT_EQ(G.size(), 2u);
  EXPECT_EQ(G.dist(0, 1), Rational(1, 3));
  EXPECT_EQ(G.relation("R", {G.class_of(parse_section(m, "z"))}), Rational(1, 2));
}

TEST(Generic, IndiscreteTop) {
  const auto m = load_fixture("indisc");
  const auto fs = enumerate_regular_ultrafilters(m.base());
  ASSERT_EQ(fs.size(), 1u);
  const GenericModel G(m, fs[0]);
  ASSERT_EQ(G.size(), 2u);
  EXPECT_EQ(G.dist(0, 1), Rational(1, 2));
}

TEST(Generic, CyclicModel) {
  const auto m = load_fixture("cyc");
  for (const auto& F : enumerate_regular_ultrafilters(m.base())) {
    const GenericModel G(m, F);
    ASSERT_EQ(G.size(), 8u);
    const std::size_t k1 = G.class_of(*m.named_section("k1"));
    const std::size_t k3 = G.class_of(*m.named_section("k3"));
    EXPECT_EQ(G.dist(k1, k3), Rational(1, 2));
    EXPECT_EQ(G.function("mult", {k1, k3}), G.class_of(*m.named_section("k4")));
    EXPECT_EQ(G.constant("e"), G.class_of(*m.named_section("k0")));
  }
}

TEST(Generic, HypothesisViolations) {
  const auto s = load_fixture("sierpinski");
  try {
    GenericModel G(s, OpenFilter({points({0, 1})}, true));
    FAIL();
  } catch (const HypothesisViolated& e) {
    EXPECT_EQ(e.hypothesis(), "regularity");
  }
  const auto m = load_fixture("disc");
  try {
    GenericModel G(m, OpenFilter({points({0, 1})}, true));
    FAIL();
  } catch (const HypothesisViolated& e) {
    EXPECT_EQ(e.hypothesis(), "not-ultra");
  }
  try {
    GenericModel G(m, OpenFilter({points({0}), points({0, 1})}, false));
    FAIL();
  } catch (const HypothesisViolated& e) {
    EXPECT_EQ(e.hypothesis(), "not-ultra");
  }
}

TEST(Generic, NotRegularOpens) {
  // On a regular finite space every open is regular, so only a family with a
  // non-open member can trip this hypothesis.
  const auto m = load_fixture("indisc");
  try {
    GenericModel G(m, OpenFilter({points({0}), points({0, 1})}, true));
    FAIL();
  } catch (const HypothesisViolated& e) {
    EXPECT_EQ(e.hypothesis(), "not-regular-opens");
  }
}

TEST(Generic, Evaluation) {
  const auto m = load_fixture("disc");
  const GenericModel G(m, at(m, "a"));
  const auto sig = m.signature();
  EXPECT_EQ(eval_generic(G, parse_formula("d(x,x)", sig), {{"x", 1}}), Rational(0));
  EXPECT_EQ(eval_generic(G, parse_formula("R(c)", sig)), Rational(0));
  EXPECT_EQ(eval_generic(G, parse_formula("inf s . R(s)", sig)), Rational(0));
  EXPECT_EQ(eval_generic(G, parse_formula("sup s . half(R(s))", sig)), Rational(1, 2));
  EXPECT_THROW(eval_generic(G, parse_formula("R(x)", sig)), UnboundVariable);
}

TEST(Gmt, DiscExamples) {
  const auto m = load_fixture("disc");
  const auto F = at(m, "a");
  const auto r1 = gmt_check(m, F, parse_condition("R(c) < 1/4", m.signature()));
  EXPECT_TRUE(r1.less.satisfied);
  EXPECT_TRUE(r1.less.forced);
  EXPECT_EQ(r1.less.witness, std::optional<PointSet>(points({0})));
  const Environment env{{"s", parse_section(m, "uw")}, {"t", parse_section(m, "vz")}};
  const auto r2 = gmt_check(m, F, parse_condition("d(s,t) > 1/4", m.signature()), env);
  EXPECT_TRUE(r2.greater.satisfied);
  EXPECT_TRUE(r2.greater.forced);
  EXPECT_TRUE(r2.agree());
  const auto r3 = gmt_check(m, F, parse_condition("R(c) > 3/4", m.signature()));
  EXPECT_FALSE(r3.greater.satisfied);
  EXPECT_FALSE(r3.greater.forced);
  EXPECT_TRUE(r3.greater.agree());
}

// A literal uniform reading of the truncated-difference case (ii) would force
// this on X while the generic value is 1/2.
TEST(Gmt, TruncatedDifferenceCaseTwo) {
  const auto m = load_fixture("disc");
  const auto r = gmt_check(m, at(m, "a"), parse_condition("sup s . R(s) -. half(1) < 1/4", m.signature()));
  EXPECT_EQ(r.value, Rational(1, 2));
  EXPECT_FALSE(r.less.forced);
  EXPECT_TRUE(r.agree());
}

TEST(InducedModulus, Fixtures) {
  for (const auto& name : {"disc", "indisc"}) {
    const auto m = load_fixture(name);
    for (const auto& F : enumerate_regular_ultrafilters(m.base())) {
      EXPECT_TRUE(check_induced_modulus(GenericModel(m, F), "R")) << name;
    }
  }
}

TEST(InducedModulus, DetectsTooGenerousDelta) {
  auto doc = test::fixture_json("disc");
  doc["moduli"]["R"]["delta"][0] = "1";
  const auto m = test::from_json(doc);
  EXPECT_FALSE(check_induced_modulus(GenericModel(m, at(m, "a")), "R"));
}

TEST(InducedModulus, SingleClassIsTrivial) {
  auto doc = test::fixture_json("indisc");
  // One element per fiber, so a single class.
  doc["etale"]["elements"] = nlohmann::json::parse(R"(["u", "w"])");
  doc["etale"]["proj"] = nlohmann::json::parse(R"({"u": "a", "w": "b"})");
  doc["etale"]["opens"] = nlohmann::json::parse(R"([["u", "w"]])");
  doc["fibers"]["a"] = nlohmann::json::parse(R"({"metric": {"u": {"u": "0"}}, "relations": {"R": {"u": "0"}}, "constants": {"c": "u"}})");
  doc["fibers"]["b"] = nlohmann::json::parse(R"({"metric": {"w": {"w": "0"}}, "relations": {"R": {"w": "0"}}, "constants": {"c": "w"}})");
  doc.erase("named_sections");
  const auto m = test::from_json(doc);
  const GenericModel G(m, enumerate_regular_ultrafilters(m.base())[0]);
  EXPECT_EQ(G.size(), 1u);
  EXPECT_TRUE(check_induced_modulus(G, "R"));
}

TEST(Pseudometric, AllRegularFixtures) {
  for (const auto& name : {"disc", "indisc"}) {
    const auto r = suite_pseudometric(load_fixture(name));
    EXPECT_TRUE(r.ok()) << name << ": " << (r.examples.empty() ? "" : r.examples.front());
    EXPECT_GT(r.checks, 0u);
  }
}
