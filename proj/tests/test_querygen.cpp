#include <algorithm>

#include "kgq/homomorphism.hpp"
#include "kgq/query_json.hpp"
#include "kgq/querygen.hpp"
#include "kgq/synthetic.hpp"
#include "test_util.hpp"

namespace kgq {
namespace {

const GraphPair& graphs() {
  static const GraphPair pair = split_graph(synthetic_graph({300, 8, 2400, 8, 21}), 0.9, 5);
  return pair;
}

bool is_subset(const AnswerSet& a, const AnswerSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

TEST(QueryType, Names) {
  EXPECT_EQ(workload_types().size(), 14u);
  for (auto t : workload_types()) EXPECT_EQ(parse_query_type(to_string(t)), t);
  for (auto t : cyclic_types()) EXPECT_EQ(parse_query_type(to_string(t)), t);
  EXPECT_EQ(parse_query_type("2in"), QueryType::in2);
  EXPECT_KGQ_ERROR(parse_query_type("4p"), usage);
}

TEST(Generate, TriangleFixture) {
  GraphBuilder b;
  b.add("a", "Friend", "b");
  b.add("b", "Friend", "c");
  b.add("c", "Coworker", "a");
  auto g = std::move(b).build();
  GenOptions opts;
  opts.require_hard = false;
  opts.count = 5;
  for (const auto& lq : generate(QueryType::triangle, g, g, opts)) {
    EXPECT_TRUE(classify(lq.query).is_cyclic);
    EXPECT_FALSE(lq.all_answers().empty());
    EXPECT_TRUE(lq.hard.empty());
  }
  auto lq = generate(QueryType::triangle, g, g, opts)[0];
  auto answers = lq.all_answers();
  EXPECT_TRUE(std::binary_search(answers.begin(), answers.end(), g.entity_id("a")) ||
              answers.size() == 1);
}

TEST(Generate, LabelsPartitionTheFullAnswers) {
  const auto& p = graphs();
  std::vector<QueryType> types(workload_types().begin(), workload_types().end());
  types.insert(types.end(), cyclic_types().begin(), cyclic_types().end());
  for (auto type : types) {
    GenOptions opts;
    opts.count = 15;
    opts.seed = 17;
    auto batch = generate(type, p.train, p.full, opts);
    ASSERT_EQ(batch.size(), 15u);
    for (const auto& lq : batch) {
      EXPECT_EQ(lq.type, type);
      EXPECT_FALSE(lq.hard.empty());
      AnswerSet both;
      std::set_intersection(lq.easy.begin(), lq.easy.end(), lq.hard.begin(), lq.hard.end(),
                            std::back_inserter(both));
      EXPECT_TRUE(both.empty());
      EXPECT_EQ(lq.all_answers(), evaluate(lq.query, p.full));
      auto on_train = evaluate(lq.query, p.train);
      EXPECT_TRUE(is_subset(lq.easy, on_train));
      EXPECT_EQ(has_negation(type), lq.query.has_negation());
      EXPECT_EQ(is_union(type), lq.query.branches.size() > 1);
    }
  }
}

TEST(Generate, DeterministicAcrossWorkers) {
  const auto& p = graphs();
  GenOptions opts;
  opts.count = 40;
  opts.seed = 99;
  auto serial = generate(QueryType::square, p.train, p.full, opts);
  opts.workers = 6;
  auto parallel = generate(QueryType::square, p.train, p.full, opts);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].query, parallel[i].query);
    EXPECT_EQ(serial[i].hard, parallel[i].hard);
  }
  opts.seed = 100;
  EXPECT_NE(generate(QueryType::square, p.train, p.full, opts)[0].query, serial[0].query);
}

TEST(Generate, UnanchoredVariants) {
  const auto& p = graphs();
  GenOptions opts;
  opts.count = 20;
  opts.require_hard = false;
  auto anchored = generate(QueryType::p1, p.train, p.full, opts);
  opts.unanchored = true;
  auto free = generate(QueryType::p1, p.train, p.full, opts);
  for (const auto& lq : free) {
    auto s = classify(lq.query);
    EXPECT_TRUE(s.is_tree_like);
    EXPECT_FALSE(s.is_anchored);
    EXPECT_EQ(s.depth, 1u);
    EXPECT_TRUE(lq.query.constants().empty());
  }
  // Same seed, same walk: unanchoring only relaxes the query.
  for (std::size_t i = 0; i < anchored.size(); ++i) {
    EXPECT_TRUE(is_subset(anchored[i].all_answers(), free[i].all_answers()));
    EXPECT_TRUE(is_contained(anchored[i].query, free[i].query));
  }
  opts.unanchor_subset = true;
  opts.count = 30;
  bool some_kept = false;
  for (const auto& lq : generate(QueryType::i3, p.train, p.full, opts)) {
    EXPECT_LT(lq.query.constants().size(), 3u);
    some_kept = some_kept || !lq.query.constants().empty();
  }
  EXPECT_TRUE(some_kept);
}

TEST(Generate, ExhaustionIsReported) {
  GraphBuilder b;
  b.add("a", "R", "b");
  b.add("b", "R", "c");
  auto g = std::move(b).build();
  GenOptions opts;
  opts.max_attempts = 50;
  EXPECT_KGQ_ERROR(generate(QueryType::triangle, g, g, opts), exhaustion);
  opts.require_hard = true;
  EXPECT_KGQ_ERROR(generate(QueryType::p1, g, g, opts), exhaustion);
}

TEST(UnravelWorkload, DepthOneTriangleIsTwoProjections) {
  const auto& p = graphs();
  GenOptions opts;
  opts.count = 10;
  auto batch = generate(QueryType::triangle, p.train, p.full, opts);
  const std::vector<int> depths = {1, 3};
  auto out = unravel_workload(batch, depths);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& u1 = out[0][i].labeled;
    EXPECT_EQ(u1.query.atoms().size(), 2u);
    for (const auto& a : u1.query.atoms()) {
      EXPECT_TRUE(a.subject == Term::var("x") || a.object == Term::var("x"));
    }
    EXPECT_EQ(u1.hard, batch[i].hard);
    EXPECT_EQ(out[1][i].labeled.query.atoms().size(), 6u);
    EXPECT_TRUE(out[1][i].provenance.contains("variables"));
  }
  const std::vector<int> bad = {17};
  EXPECT_KGQ_ERROR(unravel_workload(batch, bad), argument);
}

TEST(Workload, RoundTrip) {
  testing::TempDir dir;
  const auto& p = graphs();
  GenOptions opts;
  opts.count = 12;
  auto batch = generate(QueryType::pin, p.train, p.full, opts);
  write_workload(dir.path(), batch, p.full);
  auto back = read_workload(dir / "queries.jsonl", dir / "answers.jsonl", p.full);
  ASSERT_EQ(back.size(), batch.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].query, batch[i].query);
    EXPECT_EQ(back[i].type, batch[i].type);
    EXPECT_EQ(back[i].easy, batch[i].easy);
    EXPECT_EQ(back[i].hard, batch[i].hard);
  }
  const auto first = testing::read_text(dir / "queries.jsonl");
  write_workload(dir.path(), batch, p.full);
  EXPECT_EQ(testing::read_text(dir / "queries.jsonl"), first);
  EXPECT_KGQ_ERROR(read_workload(dir / "queries.jsonl", dir / "missing.jsonl", p.full), parse);
}

}  // namespace
}  // namespace kgq
