#include <random>

#include <gtest/gtest.h>

#include "dqm/error.hpp"
#include "dqm/outline.hpp"
#include "dqm/section_id.hpp"

namespace dqm {
namespace {

std::vector<int> path_of(const SectionNode& s) { return s.id.segments(); }

TEST(SectionIdTest, DecodesWorkedExample) {
  auto id = SectionId::parse("SECTION0104030000");
  EXPECT_EQ(id.segments(), (std::vector<int>{1, 4, 3}));
  EXPECT_EQ(id.dotted(), "1.4.3");
}

TEST(SectionIdTest, EncodesTopLevel) {
  EXPECT_EQ(SectionId::from_path({1}).code(), "SECTION0100000000");
  EXPECT_EQ(SectionId::from_path({99, 99, 99, 99, 99}).code(), "SECTION9999999999");
}

TEST(SectionIdTest, ShortCodesArePadded) {
  EXPECT_EQ(SectionId::parse("SECTION010400").code(), "SECTION0104000000");
  EXPECT_EQ(SectionId::parse("SECTION010403").segments(), (std::vector<int>{1, 4, 3}));
}

TEST(SectionIdTest, RejectsInteriorZero) {
  try {
    SectionId::parse("SECTION0001000000");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("segment 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(SectionId::parse("SECTION0100010000"), ValidationError);
}

TEST(SectionIdTest, RejectsMalformedCodes) {
  EXPECT_THROW(SectionId::parse("SECTON0100000000"), ValidationError);
  EXPECT_THROW(SectionId::parse("SECTION01000000000"), ValidationError);  // 11 digits
  EXPECT_THROW(SectionId::parse("SECTION010000000000"), ValidationError); // 12 digits
  EXPECT_THROW(SectionId::parse("SECTION010"), ValidationError);          // odd
  EXPECT_THROW(SectionId::parse("SECTION01a0000000"), ValidationError);
  EXPECT_THROW(SectionId::parse("SECTION0000000000"), ValidationError);
  EXPECT_THROW(SectionId::parse("SECTION"), ValidationError);
}

TEST(SectionIdTest, RejectsInvalidPaths) {
  EXPECT_THROW(SectionId::from_path({}), ValidationError);
  EXPECT_THROW(SectionId::from_path({1, 0}), ValidationError);
  EXPECT_THROW(SectionId::from_path({100}), ValidationError);
  EXPECT_THROW(SectionId::from_path({1, 1, 1, 1, 1, 1}), ValidationError);
}

TEST(SectionIdTest, RoundTripProperty) {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> depth(1, 5), seg(1, 99);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> path(depth(rng));
    for (int& s : path) s = seg(rng);
    auto id = SectionId::from_path(path);
    EXPECT_EQ(SectionId::parse(id.code()).segments(), path);
    EXPECT_EQ(SectionId::parse(id.code()).code(), id.code());
  }
}

TEST(RelationshipTest, DirectParentChildOnly) {
  auto s14 = SectionId::from_path({1, 4});
  auto s143 = SectionId::from_path({1, 4, 3});
  auto s1431 = SectionId::from_path({1, 4, 3, 1});
  EXPECT_EQ(section_relationship(s14, s143), Relation::kGeneral);
  EXPECT_EQ(section_relationship(s143, s14), Relation::kSpecific);
  EXPECT_EQ(section_relationship(s14, s1431), Relation::kOther);
  EXPECT_EQ(section_relationship(s14, s14), Relation::kOther);
  EXPECT_EQ(section_relationship(s143, SectionId::from_path({1, 4, 2})), Relation::kOther);
  EXPECT_EQ(section_relationship(s14, SectionId::from_path({2, 4, 3})), Relation::kOther);
}

TEST(RelationshipTest, SwapMapsGeneralToSpecific) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> depth(1, 4), seg(1, 3);
  auto random_id = [&] {
    std::vector<int> p(depth(rng));
    for (int& s : p) s = seg(rng);
    return SectionId::from_path(p);
  };
  for (int i = 0; i < 3000; ++i) {
    auto a = random_id(), b = random_id();
    Relation ab = section_relationship(a, b), ba = section_relationship(b, a);
    if (ab == Relation::kGeneral) EXPECT_EQ(ba, Relation::kSpecific);
    if (ab == Relation::kSpecific) EXPECT_EQ(ba, Relation::kGeneral);
    if (ab == Relation::kOther) EXPECT_EQ(ba, Relation::kOther);
  }
}

TEST(OutlineTest, OrdinalNumberingByAppearance) {
  auto o = parse_outline("# A\ntext a\n## B\ntext b\n## C\ntext c\n# D\ntext d\n");
  ASSERT_EQ(o.sections.size(), 4u);
  EXPECT_EQ(path_of(o.sections[0]), (std::vector<int>{1}));
  EXPECT_EQ(path_of(o.sections[1]), (std::vector<int>{1, 1}));
  EXPECT_EQ(path_of(o.sections[2]), (std::vector<int>{1, 2}));
  EXPECT_EQ(path_of(o.sections[3]), (std::vector<int>{2}));
  EXPECT_EQ(o.sections[2].title, "C");
  EXPECT_EQ(*o.sections[2].parent, SectionId::from_path({1}));
  EXPECT_FALSE(o.sections[0].parent.has_value());
  EXPECT_TRUE(o.warnings.empty());
}

TEST(OutlineTest, HeadingNumbersInTitlesAreIgnored) {
  auto o = parse_outline("# 7 Scoring\n## 7.3 Weights\n");
  EXPECT_EQ(path_of(o.sections[1]), (std::vector<int>{1, 1}));
  EXPECT_EQ(o.sections[1].title, "7.3 Weights");
}

TEST(OutlineTest, DepthJumpSynthesizesIntermediateLevel) {
  auto o = parse_outline("# A\nbody\n### C\nmore\n");
  ASSERT_EQ(o.sections.size(), 3u);
  EXPECT_EQ(path_of(o.sections[0]), (std::vector<int>{1}));
  EXPECT_EQ(path_of(o.sections[1]), (std::vector<int>{1, 1}));
  EXPECT_EQ(path_of(o.sections[2]), (std::vector<int>{1, 1, 1}));
  EXPECT_TRUE(o.sections[1].synthesized);
  EXPECT_EQ(o.sections[1].title, "");
  EXPECT_TRUE(o.sections[1].body_span.empty());
  EXPECT_EQ(*o.sections[2].parent, o.sections[1].id);
  EXPECT_EQ(o.warnings.size(), 1u);
}

TEST(OutlineTest, EmptyDocumentIsSingleRoot) {
  auto o = parse_outline("");
  ASSERT_EQ(o.sections.size(), 1u);
  EXPECT_EQ(o.sections[0].id, SectionId::from_path({1}));
  EXPECT_TRUE(o.sections[0].body_span.empty());
}

TEST(OutlineTest, NoHeadingsMeansImplicitRoot) {
  std::string doc = "just a paragraph\n\nand another\n";
  auto o = parse_outline(doc);
  ASSERT_EQ(o.sections.size(), 1u);
  EXPECT_EQ(o.sections[0].body_span, (Span{0, doc.size()}));
  EXPECT_FALSE(o.front_matter.has_value());
}

TEST(OutlineTest, FrontMatterIsReportedNotOwned) {
  std::string doc = "Preface text.\n\n# One\nbody\n";
  auto o = parse_outline(doc);
  ASSERT_TRUE(o.front_matter.has_value());
  EXPECT_EQ(*o.front_matter, (Span{0, doc.find("# One")}));
  EXPECT_EQ(o.sections[0].char_span.start, doc.find("# One"));
}

TEST(OutlineTest, FencedCodeAndLevelSixAreBodyText) {
  std::string doc = "# A\n```\n# not a heading\n```\n###### deep\n## B\n";
  auto o = parse_outline(doc);
  ASSERT_EQ(o.sections.size(), 2u);
  EXPECT_EQ(o.sections[1].title, "B");
  EXPECT_EQ(o.warnings.size(), 1u);  // the level-6 line
}

TEST(OutlineTest, ClosingHashesAndHashtagsHandled) {
  auto o = parse_outline("# Title ##\n#hashtag is text\n");
  ASSERT_EQ(o.sections.size(), 1u);
  EXPECT_EQ(o.sections[0].title, "Title");
}

TEST(OutlineTest, SpansNestAndSiblingsAreDisjoint) {
  std::string doc = "# A\na\n## B\nb\n### B1\nb1\n## C\nc\n# D\nd\n";
  auto o = parse_outline(doc);
  ASSERT_EQ(o.sections.size(), 5u);
  const auto &a = o.sections[0], &b = o.sections[1], &b1 = o.sections[2], &c = o.sections[3], &d = o.sections[4];
  EXPECT_TRUE(a.char_span.contains(b.char_span));
  EXPECT_TRUE(b.char_span.contains(b1.char_span));
  EXPECT_LE(b.char_span.end, c.char_span.start);
  EXPECT_EQ(a.char_span.end, d.char_span.start);
  EXPECT_EQ(d.char_span.end, doc.size());
  EXPECT_EQ(doc.substr(b.body_span.start, b.body_span.size()), "b\n");
}

TEST(OutlineTest, TooManySiblingsIsAnError) {
  std::string doc;
  for (int i = 0; i < 100; ++i) doc += "# h\n";
  EXPECT_THROW(parse_outline(doc), ValidationError);
}

}  // namespace
}  // namespace dqm
