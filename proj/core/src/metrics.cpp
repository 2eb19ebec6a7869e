#include "kgq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "kgq/error.hpp"

namespace kgq {

double filtered_rank(const FuzzyEntitySet& scores, EntityId answer, const AnswerSet& all_answers) {
  if (answer >= scores.size()) fail(ErrorKind::argument, "answer id outside the score vector");
  if (!std::binary_search(all_answers.begin(), all_answers.end(), answer)) {
    fail(ErrorKind::argument, "entity " + std::to_string(answer) + " is not an answer");
  }
  const double s = scores[answer];
  std::size_t higher = 0, ties = 0;
  auto next = all_answers.begin();
  for (EntityId e = 0; e < scores.size(); ++e) {
    while (next != all_answers.end() && *next < e) ++next;
    if (next != all_answers.end() && *next == e) continue;
    if (scores[e] > s) {
      ++higher;
    } else if (scores[e] == s) {
      ++ties;
    }
  }
  return 1.0 + static_cast<double>(higher) + 0.5 * static_cast<double>(ties);
}

QueryScore summarize(const QueryEvalRecord& r, MrrScope scope) {
  AnswerSet all;
  std::set_union(r.easy.begin(), r.easy.end(), r.hard.begin(), r.hard.end(), std::back_inserter(all));
  const AnswerSet& in_scope = scope == MrrScope::hard_only ? r.hard : all;
  if (in_scope.empty()) {
    fail(ErrorKind::argument, "query '" + r.id + "' has no answers in the ranking scope");
  }
  QueryScore q{r.id, r.type, 0, 0, 0, 0, r.predicted_count, r.true_count};
  for (auto a : in_scope) {
    const double rank = filtered_rank(r.scores, a, all);
    q.reciprocal_rank += 1.0 / rank;
    q.hits1 += rank <= 1 ? 1 : 0;
    q.hits3 += rank <= 3 ? 1 : 0;
    q.hits10 += rank <= 10 ? 1 : 0;
  }
  const auto n = static_cast<double>(in_scope.size());
  q.reciprocal_rank /= n;
  q.hits1 /= n;
  q.hits3 /= n;
  q.hits10 /= n;
  return q;
}

namespace {

template <typename F>
double mean_over(std::span<const QueryEvalRecord> records, F&& f) {
  if (records.empty()) fail(ErrorKind::empty_input, "no query records");
  double total = 0;
  for (const auto& r : records) total += f(r);
  return total / static_cast<double>(records.size());
}

}  // namespace

double mrr(std::span<const QueryEvalRecord> records, MrrScope scope) {
  return mean_over(records, [&](const QueryEvalRecord& r) { return summarize(r, scope).reciprocal_rank; });
}

double hits_at(std::span<const QueryEvalRecord> records, double k, MrrScope scope) {
  return mean_over(records, [&](const QueryEvalRecord& r) {
    AnswerSet all;
    std::set_union(r.easy.begin(), r.easy.end(), r.hard.begin(), r.hard.end(), std::back_inserter(all));
    const AnswerSet& in_scope = scope == MrrScope::hard_only ? r.hard : all;
    if (in_scope.empty()) fail(ErrorKind::argument, "query '" + r.id + "' has no answers in scope");
    double hit = 0;
    for (auto a : in_scope) hit += filtered_rank(r.scores, a, all) <= k ? 1 : 0;
    return hit / static_cast<double>(in_scope.size());
  });
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) fail(ErrorKind::argument, "spearman inputs differ in length");
  if (pred.size() < 2) fail(ErrorKind::argument, "spearman needs at least two pairs");
  auto rx = average_ranks(pred);
  auto ry = average_ranks(truth);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double mape(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) fail(ErrorKind::argument, "mape inputs differ in length");
  if (pred.empty()) fail(ErrorKind::empty_input, "mape of an empty list");
  double total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 0) fail(ErrorKind::argument, "mape undefined for a zero true count");
    total += std::abs(pred[i] - truth[i]) / truth[i];
  }
  return total / static_cast<double>(pred.size());
}

namespace {

TypeMetrics reduce(const std::vector<const QueryScore*>& scores) {
  TypeMetrics m;
  m.n = scores.size();
  std::vector<double> pred, truth;
  for (const auto* s : scores) {
    m.mrr += s->reciprocal_rank;
    m.hits1 += s->hits1;
    m.hits3 += s->hits3;
    m.hits10 += s->hits10;
    pred.push_back(static_cast<double>(s->predicted_count));
    truth.push_back(static_cast<double>(s->true_count));
  }
  const auto n = static_cast<double>(m.n);
  m.mrr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  m.mape = mape(pred, truth);
  if (pred.size() >= 2) m.spearmanr = spearman(pred, truth);
  return m;
}

}  // namespace

MetricsReport build_report(std::vector<QueryScore> scores) {
  if (scores.empty()) fail(ErrorKind::empty_input, "no queries to report on");
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::map<std::string, std::vector<const QueryScore*>> groups;
  std::vector<const QueryScore*> all;
  for (const auto& s : scores) {
    groups[s.type].push_back(&s);
    all.push_back(&s);
  }
  MetricsReport r;
  for (const auto& [type, group] : groups) r.per_type[type] = reduce(group);
  r.aggregate = reduce(all);
  return r;
}

nlohmann::json type_metrics_to_json(const TypeMetrics& m) {
  return {{"mrr", m.mrr},
          {"hits1", m.hits1},
          {"hits3", m.hits3},
          {"hits10", m.hits10},
          {"spearmanr", m.spearmanr ? nlohmann::json(*m.spearmanr) : nlohmann::json(nullptr)},
          {"mape", m.mape},
          {"n", m.n}};
}

nlohmann::json report_to_json(const MetricsReport& r, const std::string& dataset,
                              const std::string& predictor, const nlohmann::json& config) {
  nlohmann::json per_type = nlohmann::json::object();
  for (const auto& [type, m] : r.per_type) per_type[type] = type_metrics_to_json(m);
  return {{"dataset", dataset},
          {"predictor", predictor},
          {"config", config},
          {"per_type", per_type},
          {"aggregate", type_metrics_to_json(r.aggregate)}};
}

std::string report_to_text(const MetricsReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %6s %8s %8s %8s %8s %10s %8s\n", "type", "n", "mrr", "hits1",
                "hits3", "hits10", "spearmanr", "mape");
  out += line;
  auto row = [&](const std::string& name, const TypeMetrics& m) {
    char rho[16];
    if (m.spearmanr) {
      std::snprintf(rho, sizeof rho, "%.4f", *m.spearmanr);
    } else {
      std::snprintf(rho, sizeof rho, "-");
    }
    std::snprintf(line, sizeof line, "%-12s %6zu %8.4f %8.4f %8.4f %8.4f %10s %8.4f\n", name.c_str(),
                  m.n, m.mrr, m.hits1, m.hits3, m.hits10, rho, m.mape);
    out += line;
  };
  for (const auto& [type, m] : r.per_type) row(type, m);
  row("all", r.aggregate);
  return out;
}

}  // namespace kgq
