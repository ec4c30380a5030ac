#include <gtest/gtest.h>

#include "citetime/formats.hpp"
#include "test_util.hpp"

using namespace citetime;
using citetime::testing::read_file;
using citetime::testing::temp_dir;
using citetime::testing::write_file;

namespace {

Corpus corpus3() {
  std::vector<PaperRecord> recs{{"a", 2000, "", {}}, {"b", 2001, "", {{"a", 2}}}, {"c", 2002, "", {}}};
  return assign_slices(Corpus::from_records(recs), TimeSliceConfig({{std::nullopt, 2000}, {2001, 2002}}));
}

}  // namespace

TEST(RunFormat, RoundTripPreservesOrderAndExactScores) {
  auto c = corpus3();
  auto dir = temp_dir();
  RankedList l1{"q1", "cbf", {{2, 0.1 + 0.2}, {0, 1.0 / 3}}};
  RankedList l2{"q2", "cbf", {{1, 0.5}}};
  write_run((dir / "r.run").string(), {l1, l2}, c, "cbf");
  auto text = read_file(dir / "r.run");
  EXPECT_EQ(text.substr(0, text.find('\n')), "q1 Q0 c 1 0.30000000000000004 cbf");
  auto back = read_run((dir / "r.run").string(), c);
  EXPECT_EQ(back.tag, "cbf");
  EXPECT_EQ(back.lists.at("q1").entries, l1.entries);
  EXPECT_EQ(back.lists.at("q2").entries, l2.entries);
  auto run = to_run(back);
  EXPECT_EQ(run.at("q1"), (std::vector<PaperIndex>{2, 0}));
}

TEST(RunFormat, RejectsMalformedLines) {
  auto c = corpus3();
  auto dir = temp_dir();
  write_file(dir / "bad.run", "q1 Q0 a 1\n");
  EXPECT_THROW(read_run((dir / "bad.run").string(), c), DataError);
  write_file(dir / "gap.run", "q1 Q0 a 1 0.5 x\nq1 Q0 b 3 0.4 x\n");
  EXPECT_THROW(read_run((dir / "gap.run").string(), c), DataError);
  write_file(dir / "unk.run", "q1 Q0 zz 1 0.5 x\n");
  try {
    read_run((dir / "unk.run").string(), c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
  EXPECT_THROW(read_run((dir / "missing.run").string(), c), DataError);
}

TEST(Qrels, RoundTripAndValidation) {
  auto c = corpus3();
  auto dir = temp_dir();
  GroundTruth t{{"b", {{0, 2}}}, {"x", {{0, 1}, {2, 5}}}};
  write_qrels((dir / "q.txt").string(), t, c);
  EXPECT_EQ(read_file(dir / "q.txt"), "b 0 a 2\nx 0 a 1\nx 0 c 5\n");
  EXPECT_EQ(read_qrels((dir / "q.txt").string(), c), t);
  write_file(dir / "bad.txt", "b 0 a 0\n");
  EXPECT_THROW(read_qrels((dir / "bad.txt").string(), c), DataError);
}

TEST(Preferences, RoundTripExact) {
  auto dir = temp_dir();
  std::map<std::string, TimePreference> p{{"q1", {{0.1, 0.2, 0.7}}}, {"q2", {{1.0 / 3, 2.0 / 3}}}};
  write_preferences((dir / "p.jsonl").string(), p);
  auto back = read_preferences((dir / "p.jsonl").string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("q1").probs, p.at("q1").probs);
  EXPECT_EQ(back.at("q2").probs, p.at("q2").probs);
  write_file(dir / "bad.jsonl", "{\"id\": 3}\n");
  EXPECT_THROW(read_preferences((dir / "bad.jsonl").string()), DataError);
}

TEST(Display, RankedAndSideBySide) {
  auto c = corpus3();
  RankedList l{"q", "cbf", {{2, 0.9}, {0, 0.5}}};
  Relevance truth{{0, 2}};
  auto s = format_ranked(l, c, &truth);
  EXPECT_NE(s.find("c"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);  // header plus two rows
  const auto one = format_ranked(l, c, nullptr, 1);
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 2);
  RankedList r{"q", "timepref", {{0, 0.7}, {2, 0.6}}};
  auto side = format_side_by_side(l, r, c, &truth, 5);
  EXPECT_NE(side.find("timepref"), std::string::npos);
}
