#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generators.hpp"
#include "kgq/bilinear.hpp"
#include "kgq/error.hpp"
#include "kgq/fuzzy_exec.hpp"
#include "kgq/homomorphism.hpp"
#include "kgq/metrics.hpp"
#include "kgq/parallel.hpp"
#include "kgq/pipeline.hpp"
#include "kgq/plan.hpp"
#include "kgq/querygen.hpp"
#include "kgq/symbolic_eval.hpp"
#include "kgq/synthetic.hpp"
#include "kgq/unraveling.hpp"
#include "oracles.hpp"

namespace kgq {
namespace {

// Pinned tolerances and sizes.
constexpr double kMetricTolerance = 1e-12;
constexpr double kGradientEpsilon = 1e-5;
constexpr double kGradientMaxError = 1e-4;
constexpr double kSpearmanFloor = 0.3;
constexpr double kScoreMargin = 0.1;
constexpr std::size_t kAltWorkers = 4;

struct Outcome {
  bool pass = true;
  std::string detail;
  // Everything the criterion computed; compared across worker counts.
  std::string transcript;
  // Printed under the result line, not part of the transcript.
  std::vector<std::string> notes;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome(std::size_t workers)> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool subset(const AnswerSet& a, const AnswerSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

AnswerSet support(const FuzzyEntitySet& v) {
  AnswerSet s;
  for (EntityId e = 0; e < v.size(); ++e) {
    if (v[e] > 0.0) s.push_back(e);
  }
  return s;
}

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += p;
  return s;
}

// The 200-query corpus shared by the completeness and chain checks.
std::vector<ConjunctiveQuery> unravel_corpus() {
  std::vector<ConjunctiveQuery> qs;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(derive_seed(1, {i}));
    qs.push_back(testing::random_cq(rng));
  }
  return qs;
}

Outcome completeness(std::size_t workers) {
  const auto corpus = unravel_corpus();
  std::vector<std::string> lines(corpus.size());
  std::vector<int> found(corpus.size()), verified(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    for (int d = 1; d <= 4; ++d) {
      auto u = unravel(corpus[i], d);
      auto h = find_homomorphism(u.query, corpus[i]);
      Homomorphism canonical{canonical_projection(u)};
      const bool ok = verify_homomorphism(u.query, corpus[i], canonical);
      found[i] += h.has_value();
      verified[i] += ok;
      lines[i] += fmt("%zu d%d atoms=%zu hom=%d canon=%d\n", i, d, u.query.atoms().size(),
                      int(h.has_value()), int(ok));
    }
  });
  Outcome o;
  const int nf = std::accumulate(found.begin(), found.end(), 0);
  const int nv = std::accumulate(verified.begin(), verified.end(), 0);
  const int total = int(corpus.size()) * 4;
  o.pass = nf == total && nv == total;
  o.detail = fmt("%d/%d homomorphisms found, %d/%d canonical maps verified", nf, total, nv, total);
  o.transcript = join(lines);
  return o;
}

Outcome chain(std::size_t workers) {
  const auto corpus = unravel_corpus();
  std::vector<std::string> lines(corpus.size());
  std::vector<int> ok(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    std::vector<ConjunctiveQuery> u;
    for (int d = 1; d <= 4; ++d) u.push_back(unravel(corpus[i], d).query);
    for (int d = 1; d <= 3; ++d) {
      const auto& shallow = u[d - 1];
      const auto& deep = u[d];
      Homomorphism identity;
      for (const auto& var : shallow.variables()) identity.mapping[var] = Term::var(var);
      const bool contained = is_contained(deep, shallow);
      const bool embeds = verify_homomorphism(shallow, deep, identity);
      ok[i] += contained && embeds;
      lines[i] += fmt("%zu d%d contained=%d identity=%d\n", i, d, int(contained), int(embeds));
    }
  });
  Outcome o;
  const int n = std::accumulate(ok.begin(), ok.end(), 0);
  o.pass = n == int(corpus.size()) * 3;
  o.detail = fmt("%d/%zu containments with verified identity embedding", n, corpus.size() * 3);
  o.transcript = join(lines);
  return o;
}

Outcome optimality(std::size_t workers) {
  constexpr std::size_t kInstances = 100;
  UnravelOptions literal;
  literal.through_constants = true;
  std::vector<std::string> lines(kInstances);
  std::vector<int> lit(kInstances), def(kInstances), leafy(kInstances), valid(kInstances);
  parallel_for(kInstances, workers, [&](std::size_t i) {
    Rng rng(derive_seed(3, {i}));
    auto q = testing::random_cq(rng);
    const int d = 1 + static_cast<int>(uniform_index(rng, 4));
    auto qp = testing::random_tree_into(rng, q, d);
    auto qs = testing::random_tree_into(rng, q, d, true);
    valid[i] = find_homomorphism(qp, q).has_value() && find_homomorphism(qs, q).has_value();
    lit[i] = find_homomorphism(qp, unravel(q, d, literal).query).has_value();
    def[i] = find_homomorphism(qp, unravel(q, d).query).has_value();
    leafy[i] = find_homomorphism(qs, unravel(q, d).query).has_value();
    lines[i] = fmt("%zu d%d vars=%zu valid=%d literal=%d default=%d leafy=%d\n", i, d,
                   qp.variables().size(), valid[i], lit[i], def[i], leafy[i]);
  });
  auto sum = [](const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); };
  Outcome o;
  o.pass = sum(valid) == int(kInstances) && sum(lit) == int(kInstances) &&
           sum(leafy) == int(kInstances);
  o.detail = fmt("%d/%zu trees map into the literal unraveling", sum(lit), kInstances);
  o.notes.push_back(fmt("default unraveling: %d/%zu general trees, %d/%zu trees that stop at constants",
                        sum(def), kInstances, sum(leafy), kInstances));
  o.transcript = join(lines);
  return o;
}

Outcome data_completeness(std::size_t workers) {
  constexpr std::size_t kGraphs = 50, kQueries = 20;
  std::vector<std::string> lines(kGraphs);
  std::vector<int> ok(kGraphs), nonempty(kGraphs);
  parallel_for(kGraphs, workers, [&](std::size_t k) {
    Rng rng(derive_seed(4, {k}));
    auto g = testing::random_graph(rng, 50, 4, 300);
    testing::RandomCqSpec spec;
    spec.relations = 4;
    spec.constant_pool = g.entities().names();
    for (std::size_t j = 0; j < kQueries; ++j) {
      auto q = testing::random_cyclic_cq(rng, spec);
      auto exact = evaluate_cq(q, g);
      AnswerSet prev;
      bool good = true;
      std::string sizes = std::to_string(exact.size());
      for (int d = 1; d <= 3; ++d) {
        auto approx = evaluate_cq(unravel(q, d).query, g);
        good = good && subset(exact, approx) && (d == 1 || subset(approx, prev));
        sizes += "," + std::to_string(approx.size());
        prev = std::move(approx);
      }
      ok[k] += good;
      nonempty[k] += !exact.empty();
      lines[k] += fmt("%zu.%zu %s %d\n", k, j, sizes.c_str(), int(good));
    }
  });
  Outcome o;
  const int n = std::accumulate(ok.begin(), ok.end(), 0);
  const int ne = std::accumulate(nonempty.begin(), nonempty.end(), 0);
  o.pass = n == int(kGraphs * kQueries);
  o.detail = fmt("%d/%zu queries contained at depths 1..3 and shrinking (%d with non-empty answers)",
                 n, kGraphs * kQueries, ne);
  o.transcript = join(lines);
  return o;
}

Outcome crisp_faithfulness(std::size_t workers) {
  SyntheticSpec gs;
  gs.entities = 100;
  gs.relations = 8;
  gs.edges = 800;
  gs.communities = 5;
  gs.seed = 5;
  const auto pair = split_graph(synthetic_graph(gs), 0.9, 5);
  CrispPredictor crisp(pair.full);
  Outcome o;
  std::ostringstream tr;
  std::size_t queries = 0, faithful = 0;
  std::vector<std::string> bad_types;
  for (auto type : workload_types()) {
    GenOptions go;
    go.count = 100;
    go.seed = 5;
    go.workers = workers;
    const auto batch = generate(type, pair.train, pair.full, go);
    std::vector<int> ok(batch.size());
    parallel_for(batch.size(), workers, [&](std::size_t i) {
      auto plan = compile_plan(batch[i].query, pair.full.vocabulary());
      auto want = evaluate_plan(plan, pair.full);
      ok[i] = want == batch[i].all_answers() && support(execute(plan, crisp)) == want;
    });
    queries += batch.size();
    faithful += std::accumulate(ok.begin(), ok.end(), std::size_t{0});
    EvalSettings s;
    s.workers = workers;
    const auto m = evaluate_workload(pair.full, crisp, batch, s).front().report.aggregate;
    if (!has_negation(type) && (m.mrr != 1.0 || m.mape != 0.0)) {
      bad_types.emplace_back(to_string(type));
    }
    tr << to_string(type) << " n=" << batch.size()
       << " faithful=" << std::accumulate(ok.begin(), ok.end(), 0) << " "
       << type_metrics_to_json(m).dump() << "\n";
  }
  o.pass = faithful == queries && bad_types.empty();
  o.detail = fmt("%zu/%zu supports equal the crisp plan answers; positive types %s",
                 faithful, queries,
                 bad_types.empty() ? "all have mrr 1 and mape 0" : "miss mrr 1 / mape 0");
  for (const auto& t : bad_types) o.notes.push_back("imperfect positive type: " + t);
  o.transcript = tr.str();
  return o;
}

Outcome triangle_fixture(std::size_t) {
  auto v = [](const char* n) { return Term::var(n); };
  const auto q = ConjunctiveQuery::make(
      "x", {{"Friend", v("x"), v("y")}, {"Friend", v("y"), v("z")}, {"Coworker", v("z"), v("x")}});
  const auto want = ConjunctiveQuery::make("x", {{"Friend", v("x"), v("y2")},
                                                 {"Friend", v("y2"), v("z2")},
                                                 {"Coworker", v("z2"), v("x2")},
                                                 {"Coworker", v("z1"), v("x")},
                                                 {"Friend", v("y1"), v("z1")},
                                                 {"Friend", v("x1"), v("y1")}});
  const auto u = unravel(q, 3).query;
  const auto got_form = testing::tree_canonical_form(u);
  Outcome o;
  const std::size_t nv = u.variables().size(), na = u.atoms().size();
  const bool iso = got_form == testing::tree_canonical_form(want);
  o.pass = nv == 7 && na == 6 && iso;
  o.detail = fmt("%zu variables, %zu atoms, %s the two chains", nv, na,
                 iso ? "isomorphic to" : "not isomorphic to");
  o.transcript = to_string(u) + "\n" + got_form + "\n";
  return o;
}

Outcome hom_vs_brute_force(std::size_t workers) {
  constexpr std::size_t kPairs = 500;
  const testing::RandomCqSpec small{4, 5, 2, 2, {}};
  std::vector<int> agree(kPairs), exists(kPairs);
  parallel_for(kPairs, workers, [&](std::size_t i) {
    Rng rng(derive_seed(7, {i}));
    auto src = testing::random_cq(rng, small);
    auto dst = testing::random_cq(rng, small);
    auto h = find_homomorphism(src, dst);
    const bool sound = !h || verify_homomorphism(src, dst, *h);
    agree[i] = sound && h.has_value() == testing::brute_force_hom_exists(src, dst);
    exists[i] = h.has_value();
  });
  Outcome o;
  const int n = std::accumulate(agree.begin(), agree.end(), 0);
  const int e = std::accumulate(exists.begin(), exists.end(), 0);
  o.pass = n == int(kPairs);
  o.detail = fmt("%d/%zu pairs agree (%d with a homomorphism)", n, kPairs, e);
  for (std::size_t i = 0; i < kPairs; ++i) o.transcript += fmt("%d%d", agree[i], exists[i]);
  return o;
}

Outcome gradient(std::size_t) {
  const auto m = BilinearModel::random_init(40, 5, 32, 8);
  Rng rng(8);
  double worst = 0;
  Outcome o;
  for (int i = 0; i < 50; ++i) {
    Triple t{static_cast<EntityId>(uniform_index(rng, 40)),
             static_cast<RelationId>(uniform_index(rng, 5)),
             static_cast<EntityId>(uniform_index(rng, 40))};
    for (double label : {1.0, 0.0}) {
      const double err = gradient_check(m, t, kGradientEpsilon, label);
      worst = std::max(worst, err);
      o.transcript += fmt("%d %.17g\n", i, err);
    }
  }
  o.pass = worst < kGradientMaxError;
  o.detail = fmt("max relative error %.3g over 50 triples, both labels", worst);
  return o;
}

QueryEvalRecord record(std::string id, FuzzyEntitySet scores, AnswerSet easy, AnswerSet hard) {
  QueryEvalRecord r;
  r.id = std::move(id);
  r.type = "1p";
  r.scores = std::move(scores);
  r.easy = std::move(easy);
  r.hard = std::move(hard);
  r.true_count = r.easy.size() + r.hard.size();
  return r;
}

Outcome metric_fixtures(std::size_t) {
  Outcome o;
  std::vector<std::string> failed;
  auto check = [&](const char* name, double got, double want) {
    o.transcript += fmt("%s %.17g %.17g\n", name, got, want);
    if (!(std::abs(got - want) <= kMetricTolerance)) failed.emplace_back(name);
  };
  // q1 ranks its answer first; q2 has answers at ranks 2 and 2.5 (tie with a
  // non-answer); q3's easy answer is filtered and its hard answer ranks 4.
  const std::vector<QueryEvalRecord> rs = {
      record("q1", {1.0, 0.2, 0.1, 0.0, 0.0}, {}, {0}),
      record("q2", {0.9, 0.5, 0.8, 0.5, 0.0}, {}, {2, 3}),
      record("q3", {1.0, 0.7, 0.6, 0.5, 0.4}, {0}, {4}),
  };
  check("mrr", mrr(rs), (1.0 + (1.0 / 2 + 1.0 / 2.5) / 2 + 1.0 / 4) / 3);
  check("mrr_all", mrr(rs, MrrScope::all), (1.0 + (1.0 / 2 + 1.0 / 2.5) / 2 + (1.0 + 0.25) / 2) / 3);
  check("hits1", hits_at(rs, 1), 1.0 / 3);
  check("hits3", hits_at(rs, 3), 2.0 / 3);
  check("hits10", hits_at(rs, 10), 1.0);
  // Rank differences 0, 1, 1: 1 - 6 * 2 / (3 * 8).
  const std::vector<double> p3 = {1, 2, 3}, t3 = {1, 3, 2};
  check("spearman", spearman(p3, t3).value_or(NAN), 0.5);
  const std::vector<double> pc = {2, 5, 9}, tc = {1, 4, 10};
  check("mape", mape(pc, tc), (1.0 + 0.25 + 0.1) / 3);
  const std::vector<double> up = {1, 2, 3, 4, 5, 6}, down = {6, 5, 4, 3, 2, 1};
  check("spearman_reversed", spearman(up, down).value_or(NAN), -1.0);
  const std::vector<double> a = {1, 2, 2, 3, 7, 7, 7, 0};
  const std::vector<double> b = {3, 1, 4, 1, 5, 9, 2, 6};
  check("spearman_ties", spearman(a, b).value_or(NAN), testing::two_step_spearman(a, b));
  o.pass = failed.empty();
  o.detail = failed.empty() ? "9/9 fixtures within 1e-12" : "failed:";
  for (const auto& f : failed) o.detail += " " + f;
  return o;
}

TrainConfig smoke_train_config() {
  TrainConfig cfg;
  cfg.dim = 32;
  cfg.epochs = 20;
  // Chosen by 1p link-prediction mrr on a separately seeded split.
  cfg.negatives = 64;
  cfg.learning_rate = 0.01;
  return cfg;
}

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

bool metrics_in_range(const TypeMetrics& m) {
  return in_unit(m.mrr) && in_unit(m.hits1) && in_unit(m.hits3) && in_unit(m.hits10) &&
         std::isfinite(m.mape) && m.mape >= 0.0 &&
         (!m.spearmanr || (std::isfinite(*m.spearmanr) && std::abs(*m.spearmanr) <= 1.0));
}

struct SmokeRun {
  std::string report;  // every report and the sweep table, as bytes
  std::vector<DepthReport> triangles, squares;
  double margin = 0;
};

SmokeRun smoke_run(const GraphPair& pair, const TrainConfig& cfg, std::size_t workers) {
  const auto trained = train(pair.train, cfg);
  const auto& model = trained.model;
  SmokeRun run;
  Rng rng(derive_seed(10, {cfg.seed}));
  const auto n = pair.train.num_entities();
  double observed = 0, corrupted = 0;
  for (const auto& t : pair.train.edges()) {
    observed += model.score(t.relation, t.head, t.tail);
    const auto other = static_cast<EntityId>(uniform_index(rng, n - 1));
    if (coin(rng)) {
      corrupted += model.score(t.relation, other >= t.head ? other + 1 : other, t.tail);
    } else {
      corrupted += model.score(t.relation, t.head, other >= t.tail ? other + 1 : other);
    }
  }
  run.margin = (observed - corrupted) / static_cast<double>(pair.train.num_edges());

  ScoreCache cache(model);
  const nlohmann::json config = {{"train", cfg.to_json()}, {"fuzzy", FuzzyConfig{}.to_json()}};
  for (auto [type, depths] : {std::pair{QueryType::triangle, std::vector<int>{2, 3, 4}},
                              std::pair{QueryType::square, std::vector<int>{4, 6}}}) {
    GenOptions go;
    go.count = 100;
    go.seed = 5;
    go.workers = workers;
    const auto batch = generate(type, pair.train, pair.full, go);
    EvalSettings s;
    s.depths = depths;
    s.workers = workers;
    auto reports = evaluate_workload(pair.full, cache, batch, s);
    for (const auto& r : reports) {
      run.report += report_to_json(r.report, "synthetic", "bilinear", config).dump(2) + "\n";
    }
    run.report += sweep_csv(reports);
    (type == QueryType::triangle ? run.triangles : run.squares) = std::move(reports);
  }
  return run;
}

// Deeper unravelings only add atoms, so no predicted count may grow.
bool counts_shrink(const std::vector<DepthReport>& reports) {
  for (std::size_t d = 1; d < reports.size(); ++d) {
    for (std::size_t i = 0; i < reports[d].scores.size(); ++i) {
      if (reports[d].scores[i].predicted_count > reports[d - 1].scores[i].predicted_count) return false;
    }
  }
  return true;
}

const GraphPair& smoke_graphs() {
  static const GraphPair pair = split_graph(synthetic_graph({}), 0.9, 1);
  return pair;
}

Outcome end_to_end(std::size_t workers) {
  const auto& pair = smoke_graphs();
  const auto cfg = smoke_train_config();
  const auto first = smoke_run(pair, cfg, workers);
  const auto second = smoke_run(pair, cfg, workers);

  bool ranges = true;
  double best = -2;
  int best_depth = 0;
  std::string per_depth;
  for (const auto* reports : {&first.triangles, &first.squares}) {
    for (const auto& r : *reports) {
      ranges = ranges && metrics_in_range(r.report.aggregate);
      for (const auto& [t, m] : r.report.per_type) ranges = ranges && metrics_in_range(m);
      const auto& m = r.report.aggregate;
      const double sp = m.spearmanr.value_or(NAN);
      per_depth += fmt(" %s@%d sp=%.3f mrr=%.3f mape=%.2f;", reports == &first.triangles ? "tri" : "sq",
                       r.depth, sp, m.mrr, m.mape);
      if (reports == &first.triangles && m.spearmanr && *m.spearmanr > best) {
        best = *m.spearmanr;
        best_depth = r.depth;
      }
    }
  }
  const bool shrink = counts_shrink(first.triangles) && counts_shrink(first.squares);
  const bool identical = first.report == second.report;
  const bool margin = first.margin > kScoreMargin;
  Outcome o;
  o.pass = ranges && best > kSpearmanFloor && shrink && identical && margin;
  o.detail = fmt("triangle spearman %.3f at depth %d (floor %.1f), ranges %s, counts %s, rerun %s, "
                 "score margin %.3f",
                 best, best_depth, kSpearmanFloor, ranges ? "ok" : "violated",
                 shrink ? "shrink" : "grow", identical ? "byte-identical" : "differs", first.margin);
  o.notes.push_back("per depth:" + per_depth);
  o.transcript = first.report + fmt("margin %.17g\n", first.margin);
  return o;
}

// Not a criterion: how the triangle correlation moves with the training seed.
std::string seed_spread() {
  const auto& pair = smoke_graphs();
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string s = "triangle spearman at best depth by training seed:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = smoke_train_config();
    cfg.seed = seed;
    const auto run = smoke_run(pair, cfg, workers);
    double best = -2;
    for (const auto& r : run.triangles) best = std::max(best, r.report.aggregate.spearmanr.value_or(-2));
    s += fmt(" %llu:%.3f", static_cast<unsigned long long>(seed), best);
  }
  return s;
}

struct Timed {
  Outcome outcome;
  double seconds = 0;
};

Timed timed(const Criterion& c, std::size_t workers) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  try {
    t.outcome = c.run(workers);
  } catch (const std::exception& e) {
    t.outcome.pass = false;
    t.outcome.detail = std::string("threw: ") + e.what();
  }
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

void print(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s %2d %-22s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

}  // namespace
}  // namespace kgq

int main(int argc, char** argv) {
  using namespace kgq;
  const bool spread = argc > 1 && std::string(argv[1]) == "--seed-spread";
  const std::vector<Criterion> criteria = {
      {1, "completeness", 60, completeness},
      {2, "chain", 60, chain},
      {3, "optimality", 120, optimality},
      {4, "data completeness", 300, data_completeness},
      {5, "crisp faithfulness", 180, crisp_faithfulness},
      {6, "triangle fixture", 60, triangle_fixture},
      {7, "hom vs brute force", 120, hom_vs_brute_force},
      {8, "gradient check", 10, gradient},
      {9, "metric fixtures", 60, metric_fixtures},
      {10, "end-to-end smoke", 600, end_to_end},
  };
  int failures = 0;
  std::vector<std::uint64_t> digests;
  for (const auto& c : criteria) {
    const auto t = timed(c, 1);
    const bool in_time = t.seconds < c.budget_s;
    const bool pass = t.outcome.pass && in_time;
    failures += !pass;
    print(c.id, c.name, pass,
          t.outcome.detail + fmt(" [%.1fs, budget %.0fs%s]", t.seconds, c.budget_s,
                                 in_time ? "" : ", over budget"));
    for (const auto& n : t.outcome.notes) std::printf("        %s\n", n.c_str());
    digests.push_back(testing::digest(t.outcome.transcript));
    if (c.id == 10 && spread) std::printf("        %s\n", seed_spread().c_str());
  }

  std::vector<int> differing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t = timed(criteria[i], kAltWorkers);
    if (testing::digest(t.outcome.transcript) != digests[i]) differing.push_back(criteria[i].id);
  }
  std::string detail = fmt("criteria 1-10 rerun with %zu workers: ", kAltWorkers);
  if (differing.empty()) {
    detail += "all outputs byte-identical";
  } else {
    detail += "outputs differ for";
    for (int id : differing) detail += " " + std::to_string(id);
  }
  failures += !differing.empty();
  print(11, "determinism", differing.empty(), detail);
  return failures == 0 ? 0 : 1;
}
