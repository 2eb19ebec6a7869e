#include "kgq/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "kgq/error.hpp"
#include "kgq/parallel.hpp"
#include "kgq/plan.hpp"

namespace kgq {

namespace {

bool needs_unraveling(const ConjunctiveQuery& q) {
  return q.is_pure() && classify(q).is_cyclic;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::parse, "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

QueryScore evaluate_query(const KnowledgeGraph& g, const LinkPredictor& predictor,
                          const LabeledQuery& q, const EvalSettings& settings) {
  const auto plan = compile_plan(q.query, g.vocabulary());
  QueryEvalRecord r;
  r.id = q.query.id;
  r.type = std::string(to_string(q.type));
  r.scores = execute(plan, predictor, settings.fuzzy);
  r.easy = q.easy;
  r.hard = q.hard;
  r.predicted_count = predicted_cardinality(r.scores, settings.fuzzy);
  r.true_count = q.all_answers().size();
  return summarize(r, settings.scope);
}

std::vector<DepthReport> evaluate_workload(const KnowledgeGraph& g, const LinkPredictor& predictor,
                                           std::span<const LabeledQuery> queries,
                                           const EvalSettings& settings) {
  settings.fuzzy.validate();
  if (queries.empty()) fail(ErrorKind::empty_input, "no queries to evaluate");
  if (predictor.num_entities() != g.num_entities() || predictor.num_relations() != g.num_relations()) {
    fail(ErrorKind::binding, "predictor dimensions do not match the graph vocabulary");
  }
  std::vector<bool> cyclic(queries.size());
  bool any_cyclic = false;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    cyclic[i] = needs_unraveling(queries[i].query);
    any_cyclic = any_cyclic || cyclic[i];
  }
  std::vector<int> depths{0};
  if (any_cyclic) {
    if (settings.depths.empty()) fail(ErrorKind::usage, "cyclic queries need at least one unraveling depth");
    depths = settings.depths;
  }

  // Tree-like queries score the same at every depth; compute them once.
  std::vector<QueryScore> direct(queries.size());
  parallel_for(queries.size(), settings.workers, [&](std::size_t i) {
    if (!cyclic[i]) direct[i] = evaluate_query(g, predictor, queries[i], settings);
  });

  std::vector<DepthReport> out;
  for (int d : depths) {
    std::vector<QueryScore> scores(queries.size());
    parallel_for(queries.size(), settings.workers, [&](std::size_t i) {
      if (!cyclic[i]) {
        scores[i] = direct[i];
        return;
      }
      LabeledQuery u = queries[i];
      u.query = unravel(queries[i].query, d, settings.unravel).query;
      u.query.id = queries[i].query.id;
      scores[i] = evaluate_query(g, predictor, u, settings);
    });
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    DepthReport rep{d, build_report(scores), std::move(scores)};
    out.push_back(std::move(rep));
  }
  return out;
}

std::string sweep_csv(std::span<const DepthReport> reports) {
  std::string out = "depth,type,mrr,spearmanr,mape,hits1\n";
  char buf[256];
  auto row = [&](int depth, const std::string& type, const TypeMetrics& m) {
    std::string rho;
    if (m.spearmanr) {
      std::snprintf(buf, sizeof buf, "%.17g", *m.spearmanr);
      rho = buf;
    }
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%s,%.17g,%.17g\n", depth, type.c_str(), m.mrr,
                  rho.c_str(), m.mape, m.hits1);
    out += buf;
  };
  for (const auto& rep : reports) {
    for (const auto& [type, m] : rep.report.per_type) row(rep.depth, type, m);
    row(rep.depth, "all", rep.report.aggregate);
  }
  return out;
}

void write_reports(const std::filesystem::path& dir, std::span<const DepthReport> reports,
                   const std::string& dataset, const std::string& predictor,
                   const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  for (const auto& rep : reports) {
    const std::string stem = rep.depth == 0 ? "report" : "report_d" + std::to_string(rep.depth);
    auto j = report_to_json(rep.report, dataset, predictor, config);
    if (rep.depth != 0) j["depth"] = rep.depth;
    write_text(dir / (stem + ".json"), j.dump(2) + "\n");
    write_text(dir / (stem + ".txt"), report_to_text(rep.report));
  }
}

}  // namespace kgq
