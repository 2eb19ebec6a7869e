#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgq/bilinear.hpp"
#include "kgq/error.hpp"
#include "kgq/fuzzy_exec.hpp"
#include "kgq/homomorphism.hpp"
#include "kgq/kg_store.hpp"
#include "kgq/pipeline.hpp"
#include "kgq/query_json.hpp"
#include "kgq/querygen.hpp"
#include "kgq/symbolic_eval.hpp"
#include "kgq/unraveling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, internal = 3 };

int exit_code(kgq::ErrorKind k) {
  switch (k) {
    case kgq::ErrorKind::usage:
    case kgq::ErrorKind::argument:
      return usage;
    case kgq::ErrorKind::internal:
      return internal;
    default:
      return data;
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) kgq::fail(kgq::ErrorKind::parse, "cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) kgq::fail(kgq::ErrorKind::parse, "cannot write '" + p.string() + "'");
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

kgq::ConjunctiveQuery load_query(const fs::path& p, const kgq::Vocabulary* vocab = nullptr) {
  return kgq::parse_query(std::string_view(read_file(p)), vocab);
}

/// "2,3,4" or "2..6" (inclusive), or a mix such as "2..4,6".
std::vector<int> parse_depths(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ',');) {
    if (part.empty()) continue;
    try {
      if (auto dots = part.find(".."); dots != std::string::npos) {
        int lo = std::stoi(part.substr(0, dots)), hi = std::stoi(part.substr(dots + 2));
        for (int d = lo; d <= hi; ++d) out.push_back(d);
      } else {
        out.push_back(std::stoi(part));
      }
    } catch (const std::logic_error&) {
      kgq::fail(kgq::ErrorKind::usage, "bad depth list '" + spec + "'");
    }
  }
  if (out.empty()) kgq::fail(kgq::ErrorKind::usage, "empty depth list");
  const kgq::UnravelOptions caps;
  for (int d : out) {
    if (d < 1 || d > caps.max_depth) {
      kgq::fail(kgq::ErrorKind::usage, "depth " + std::to_string(d) + " outside [1, " +
                                           std::to_string(caps.max_depth) + "]");
    }
  }
  return out;
}

/// Full graph (optionally aligned with a train graph so ids agree).
kgq::GraphPair load_pair(const std::string& train, const std::string& full) {
  if (train.empty()) {
    auto g = kgq::load_graph(full);
    return {g, g};
  }
  return kgq::align_pair(kgq::load_graph(train), kgq::load_graph(full));
}

struct EvalArgs {
  std::string train, full, queries, answers, predictor = "crisp", out, dataset, scope = "hard_only";
  std::string projection = "max_product", conj = "product", disj = "prob_sum", depths = "3";
  double threshold = 0.5;
  std::size_t parallel = 1;
  std::size_t cache_mb = 1024;
};

void add_eval_options(CLI::App* cmd, EvalArgs& a, bool sweep) {
  cmd->add_option("--graph", a.full, "Graph used for vocabulary and crisp scoring (TSV)")->required();
  cmd->add_option("--train", a.train, "Train graph whose ids the model was trained on");
  cmd->add_option("--queries", a.queries, "queries.jsonl")->required();
  cmd->add_option("--answers", a.answers, "answers.jsonl (default: next to the queries)");
  cmd->add_option("--predictor", a.predictor, "'crisp' or a model file");
  cmd->add_option("--projection", a.projection, "max_product|noisy_or");
  cmd->add_option("--conj", a.conj, "product|min");
  cmd->add_option("--disj", a.disj, "prob_sum|max");
  cmd->add_option("--threshold", a.threshold, "Cardinality threshold in (0,1)");
  auto* depths = cmd->add_option("--depths", a.depths, "Unraveling depths, e.g. 2..6 or 3,4");
  if (sweep) depths->required();
  cmd->add_option("--parallel", a.parallel, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--scope", a.scope, "hard_only|all");
  cmd->add_option("--dataset", a.dataset, "Dataset label for the report");
  cmd->add_option("--cache-mb", a.cache_mb, "Score matrix cache budget for model predictors");
  cmd->add_option("--out", a.out, "Output directory")->required();
}

std::vector<kgq::DepthReport> run_eval(const EvalArgs& a, json& config) {
  auto pair = load_pair(a.train, a.full);
  const auto& g = pair.full;
  kgq::EvalSettings s;
  s.fuzzy.projection = kgq::parse_projection_mode(a.projection);
  s.fuzzy.conjunction = kgq::parse_conjunction_mode(a.conj);
  s.fuzzy.disjunction = kgq::parse_disjunction_mode(a.disj);
  s.fuzzy.count_threshold = a.threshold;
  s.fuzzy.validate();
  s.depths = parse_depths(a.depths);
  s.workers = a.parallel;
  if (a.scope == "hard_only") {
    s.scope = kgq::MrrScope::hard_only;
  } else if (a.scope == "all") {
    s.scope = kgq::MrrScope::all;
  } else {
    kgq::fail(kgq::ErrorKind::usage, "unknown scope '" + a.scope + "'");
  }
  const fs::path answers = a.answers.empty() ? fs::path(a.queries).parent_path() / "answers.jsonl"
                                             : fs::path(a.answers);
  auto queries = kgq::read_workload(a.queries, answers, g);

  std::optional<kgq::CrispPredictor> crisp;
  std::optional<kgq::BilinearModel> model;
  std::optional<kgq::ScoreCache> cache;
  const kgq::LinkPredictor* predictor = nullptr;
  if (a.predictor == "crisp") {
    predictor = &crisp.emplace(g);
  } else {
    model = kgq::BilinearModel::load(a.predictor);
    model->check_vocabulary(g);
    predictor = &cache.emplace(*model, a.cache_mb << 20);
  }

  config = {{"graph", a.full},
            {"train", a.train},
            {"queries", a.queries},
            {"answers", answers.string()},
            {"predictor", a.predictor},
            {"fuzzy", s.fuzzy.to_json()},
            {"depths", s.depths},
            {"scope", a.scope}};
  auto reports = kgq::evaluate_workload(g, *predictor, queries, s);
  fs::create_directories(a.out);
  write_file(fs::path(a.out) / "config.json", config.dump(2) + "\n");
  return reports;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph conjunctive query toolkit"};
  app.require_subcommand(1);

  // load-check
  std::vector<std::string> lc_graphs;
  std::string lc_dict;
  auto* load_check = app.add_subcommand("load-check", "Load TSV graphs and print their statistics");
  load_check->add_option("--graph", lc_graphs, "TSV file(s); several are merged")->required();
  load_check->add_option("--dict-out", lc_dict, "Write the dictionaries as JSON");

  // unravel
  std::string un_query, un_out;
  int un_depth = 0;
  auto* unravel_cmd = app.add_subcommand("unravel", "Print the depth-d unraveling of a query");
  unravel_cmd->add_option("--query", un_query, "Query JSON")->required();
  unravel_cmd->add_option("--depth", un_depth, "Depth d >= 1")->required();
  unravel_cmd->add_option("--out", un_out, "Output file (default stdout)");
  kgq::UnravelOptions un_opts;
  unravel_cmd->add_flag("--through-constants", un_opts.through_constants,
                        "Keep extending paths past constants (result may not be tree-like)");

  // contains
  std::string ct_q, ct_qp;
  auto* contains_cmd = app.add_subcommand("contains", "Decide whether q is contained in q'");
  contains_cmd->add_option("--query", ct_q, "q (JSON)")->required();
  contains_cmd->add_option("--query-prime", ct_qp, "q' (JSON)")->required();

  // answer
  std::string an_graph, an_query;
  auto* answer_cmd = app.add_subcommand("answer", "Exact answers of a query over a graph");
  answer_cmd->add_option("--graph", an_graph, "TSV graph")->required();
  answer_cmd->add_option("--query", an_query, "Query JSON")->required();

  // gen
  std::string gen_type, gen_train, gen_full, gen_out, gen_depths;
  kgq::GenOptions gen_opts;
  bool gen_allow_easy = false;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a labeled query workload");
  gen_cmd->add_option("--type", gen_type, "1p..up, double_path, triangle, square")->required();
  gen_cmd->add_option("--count", gen_opts.count, "Number of queries")->required();
  gen_cmd->add_option("--train", gen_train, "Train graph (TSV)")->required();
  gen_cmd->add_option("--full", gen_full, "Full graph, or the triples missing from train (TSV)")->required();
  gen_cmd->add_option("--seed", gen_opts.seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();
  gen_cmd->add_flag("--unanchored", gen_opts.unanchored, "Replace anchors by existential variables");
  gen_cmd->add_flag("--unanchor-subset", gen_opts.unanchor_subset,
                    "With --unanchored, replace a random non-empty subset of anchors");
  gen_cmd->add_flag("--allow-no-hard", gen_allow_easy, "Keep queries without hard answers");
  gen_cmd->add_option("--max-attempts", gen_opts.max_attempts, "Rejection cap per query");
  gen_cmd->add_option("--parallel", gen_opts.workers, "Worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--unravel-depths", gen_depths, "Also write unravelings at these depths");

  // train
  std::string tr_graph, tr_full, tr_out, tr_opt = "adam", tr_trace;
  kgq::TrainConfig tr_cfg;
  auto* train_cmd = app.add_subcommand("train", "Train a bilinear link predictor");
  train_cmd->add_option("--graph", tr_graph, "Train graph (TSV)")->required();
  train_cmd->add_option("--full", tr_full, "Graph whose extra entities the model must cover");
  train_cmd->add_option("--dim", tr_cfg.dim, "Embedding dimension");
  train_cmd->add_option("--epochs", tr_cfg.epochs, "Epochs");
  train_cmd->add_option("--lr", tr_cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--negatives", tr_cfg.negatives, "Negatives per positive");
  train_cmd->add_option("--batch-size", tr_cfg.batch_size, "Positives per optimizer step");
  train_cmd->add_option("--seed", tr_cfg.seed, "Seed");
  train_cmd->add_option("--optimizer", tr_opt, "adam|sgd");
  train_cmd->add_option("--l2", tr_cfg.l2, "L2 penalty");
  train_cmd->add_option("--loss-trace", tr_trace, "Write the per-epoch loss as JSON");
  train_cmd->add_option("--out", tr_out, "Model file")->required();

  // eval / sweep
  EvalArgs ev, sw;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a labeled workload and write reports");
  add_eval_options(eval_cmd, ev, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "Depth sweep over cyclic queries, written as CSV");
  add_eval_options(sweep_cmd, sw, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*load_check) {
      kgq::KnowledgeGraph g = kgq::load_graph(lc_graphs.front());
      for (std::size_t i = 1; i < lc_graphs.size(); ++i) {
        g = kgq::merge(g, kgq::load_graph(lc_graphs[i], g.vocabulary()));
      }
      std::cout << json{{"entities", g.num_entities()},
                        {"relations", g.num_relations()},
                        {"edges", g.num_edges()}}
                       .dump()
                << "\n";
      if (!lc_dict.empty()) write_file(lc_dict, kgq::dictionaries_to_json(g).dump(2) + "\n");
    } else if (*unravel_cmd) {
      auto q = load_query(un_query);
      auto u = kgq::unravel(q, un_depth, un_opts);
      std::optional<kgq::ShapeReport> shape;
      if (kgq::build_query_graph(u.query).connected()) shape = kgq::classify(u.query);
      json out{{"query", kgq::serialize_query(u.query)},
               {"provenance", kgq::provenance_to_json(u)},
               {"atoms", u.query.atoms().size()},
               {"variables", u.query.variables().size()},
               {"tree_like", shape && shape->is_tree_like},
               {"depth", shape && shape->depth ? json(*shape->depth) : json(nullptr)}};
      emit(un_out, out.dump(2) + "\n");
    } else if (*contains_cmd) {
      auto q = load_query(ct_q);
      auto qp = load_query(ct_qp);
      auto h = kgq::find_homomorphism(qp, q);
      std::cout << json{{"contained", h.has_value()},
                        {"homomorphism", h ? h->to_json() : json(nullptr)}}
                       .dump(2)
                << "\n";
    } else if (*answer_cmd) {
      auto g = kgq::load_graph(an_graph);
      auto q = load_query(an_query, &g.vocabulary());
      json names = json::array();
      for (auto e : kgq::evaluate(q, g)) names.push_back(g.entities().name(e));
      std::cout << names.dump() << "\n";
    } else if (*gen_cmd) {
      auto type = kgq::parse_query_type(gen_type);
      auto pair = kgq::align_pair(kgq::load_graph(gen_train), kgq::load_graph(gen_full));
      gen_opts.require_hard = !gen_allow_easy;
      auto batch = kgq::generate(type, pair.train, pair.full, gen_opts);
      kgq::write_workload(gen_out, batch, pair.full);
      json config{{"type", gen_type},
                  {"count", gen_opts.count},
                  {"seed", gen_opts.seed},
                  {"train", gen_train},
                  {"full", gen_full},
                  {"unanchored", gen_opts.unanchored},
                  {"unanchor_subset", gen_opts.unanchor_subset},
                  {"require_hard", gen_opts.require_hard},
                  {"max_attempts", gen_opts.max_attempts}};
      if (!gen_depths.empty()) {
        auto depths = parse_depths(gen_depths);
        config["unravel_depths"] = depths;
        auto levels = kgq::unravel_workload(batch, depths);
        for (std::size_t k = 0; k < depths.size(); ++k) {
          const fs::path dir = fs::path(gen_out) / ("depth_" + std::to_string(depths[k]));
          std::vector<kgq::LabeledQuery> unraveled;
          std::string provenance;
          for (const auto& uq : levels[k]) {
            unraveled.push_back(uq.labeled);
            provenance += json{{"id", uq.labeled.query.id}, {"provenance", uq.provenance}}.dump() + "\n";
          }
          kgq::write_workload(dir, unraveled, pair.full);
          write_file(dir / "provenance.jsonl", provenance);
        }
      }
      write_file(fs::path(gen_out) / "config.json", config.dump(2) + "\n");
    } else if (*train_cmd) {
      if (tr_opt == "adam") {
        tr_cfg.optimizer = kgq::Optimizer::adam;
      } else if (tr_opt == "sgd") {
        tr_cfg.optimizer = kgq::Optimizer::sgd;
      } else {
        kgq::fail(kgq::ErrorKind::usage, "unknown optimizer '" + tr_opt + "'");
      }
      auto g = kgq::load_graph(tr_graph);
      if (!tr_full.empty()) g = kgq::align_pair(g, kgq::load_graph(tr_full)).train;
      auto result = kgq::train(g, tr_cfg);
      result.model.save(tr_out);
      if (!tr_trace.empty()) write_file(tr_trace, json(result.loss_trace).dump() + "\n");
      std::cout << json{{"epochs", tr_cfg.epochs},
                        {"final_loss", result.loss_trace.empty() ? json(nullptr)
                                                                 : json(result.loss_trace.back())}}
                       .dump()
                << "\n";
    } else if (*eval_cmd) {
      json config;
      auto reports = run_eval(ev, config);
      kgq::write_reports(ev.out, reports, ev.dataset, ev.predictor, config);
      for (const auto& r : reports) {
        if (r.depth != 0) std::cout << "depth " << r.depth << "\n";
        std::cout << kgq::report_to_text(r.report);
      }
    } else if (*sweep_cmd) {
      json config;
      auto reports = run_eval(sw, config);
      if (reports.size() == 1 && reports.front().depth == 0) {
        kgq::fail(kgq::ErrorKind::usage, "sweep needs cyclic queries");
      }
      const auto csv = kgq::sweep_csv(reports);
      write_file(fs::path(sw.out) / "sweep.csv", csv);
      std::cout << csv;
    }
  } catch (const kgq::Error& e) {
    std::cerr << "kgq: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "kgq: internal error: " << e.what() << "\n";
    return internal;
  }
  return ok;
}
