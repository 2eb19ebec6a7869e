#include "kgq/fuzzy_exec.hpp"

#include <algorithm>
#include <string>

#include "kgq/error.hpp"

namespace kgq {

void FuzzyConfig::validate() const {
  if (!(count_threshold > 0.0 && count_threshold < 1.0)) {
    fail(ErrorKind::argument, "count threshold must lie in (0,1), got " + std::to_string(count_threshold));
  }
}

nlohmann::json FuzzyConfig::to_json() const {
  return {{"projection", projection == ProjectionMode::max_product ? "max_product" : "noisy_or"},
          {"conj", conjunction == ConjunctionMode::product ? "product" : "min"},
          {"disj", disjunction == DisjunctionMode::prob_sum ? "prob_sum" : "max"},
          {"threshold", count_threshold}};
}

ProjectionMode parse_projection_mode(std::string_view s) {
  if (s == "max_product") return ProjectionMode::max_product;
  if (s == "noisy_or") return ProjectionMode::noisy_or;
  fail(ErrorKind::usage, "unknown projection mode '" + std::string(s) + "'");
}

ConjunctionMode parse_conjunction_mode(std::string_view s) {
  if (s == "product") return ConjunctionMode::product;
  if (s == "min") return ConjunctionMode::min;
  fail(ErrorKind::usage, "unknown conjunction mode '" + std::string(s) + "'");
}

DisjunctionMode parse_disjunction_mode(std::string_view s) {
  if (s == "prob_sum") return DisjunctionMode::prob_sum;
  if (s == "max") return DisjunctionMode::max;
  fail(ErrorKind::usage, "unknown disjunction mode '" + std::string(s) + "'");
}

namespace {

class Executor {
 public:
  Executor(const LinkPredictor& p, const FuzzyConfig& cfg, ExecTrace* trace)
      : p_(p), crisp_(p.crisp_graph()), cfg_(cfg), trace_(trace), n_(p.num_entities()) {}

  FuzzyEntitySet run(const ExecutionPlan& plan) {
    if (plan.nodes.empty()) fail(ErrorKind::argument, "empty execution plan");
    std::vector<FuzzyEntitySet> values(plan.nodes.size());
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
      const auto& node = plan.nodes[i];
      auto child = [&](std::size_t k) -> FuzzyEntitySet& { return values[node.children.at(k)]; };
      FuzzyEntitySet out;
      switch (node.op) {
        case PlanOp::anchor:
          if (node.entity >= n_) fail(ErrorKind::index, "anchor entity out of range for predictor");
          out.assign(n_, 0.0);
          out[node.entity] = 1.0;
          break;
        case PlanOp::existential:
          out.assign(n_, 1.0);
          break;
        case PlanOp::projection:
          out = project(child(0), node.relation, node.dir);
          break;
        case PlanOp::intersection:
          out = std::move(child(0));
          for (std::size_t k = 1; k < node.children.size(); ++k) conjoin(out, child(k));
          break;
        case PlanOp::disjunction:
          out = std::move(child(0));
          for (std::size_t k = 1; k < node.children.size(); ++k) disjoin(out, child(k));
          break;
        case PlanOp::negation:
          out = std::move(child(0));
          for (auto& x : out) x = 1.0 - x;
          break;
      }
      clamp(out);
      // Children are consumed exactly once in a tree plan.
      for (auto c : node.children) FuzzyEntitySet().swap(values[c]);
      values[i] = std::move(out);
    }
    return std::move(values[plan.root()]);
  }

 private:
  FuzzyEntitySet project(const FuzzyEntitySet& v, RelationId rel, Direction dir) {
    if (rel >= p_.num_relations()) {
      fail(ErrorKind::predictor, "relation id " + std::to_string(rel) + " unknown to predictor");
    }
    const bool noisy = cfg_.projection == ProjectionMode::noisy_or;
    // max_product accumulates the max, noisy_or the product of complements.
    FuzzyEntitySet acc(n_, noisy ? 1.0 : 0.0);
    auto fold = [&](double& slot, double x) {
      if (noisy) {
        slot *= 1.0 - x;
      } else if (x > slot) {
        slot = x;
      }
    };

    if (crisp_ != nullptr) {
      for (EntityId a = 0; a < n_; ++a) {
        if (v[a] <= 0.0) continue;
        for (auto b : crisp_->neighbors(a, rel, dir)) fold(acc[b], v[a]);
      }
    } else if (dir == Direction::fwd) {
      for (EntityId a = 0; a < n_; ++a) {
        if (v[a] <= 0.0) continue;
        auto row = p_.row(rel, a, scratch_);
        for (std::size_t b = 0; b < n_; ++b) fold(acc[b], v[a] * row[b]);
      }
    } else {
      for (EntityId a = 0; a < n_; ++a) {
        auto row = p_.row(rel, a, scratch_);
        double slot = acc[a];
        for (std::size_t b = 0; b < n_; ++b) {
          if (v[b] > 0.0) fold(slot, v[b] * row[b]);
        }
        acc[a] = slot;
      }
    }
    if (noisy) {
      for (auto& x : acc) x = 1.0 - x;
    }
    return acc;
  }

  void conjoin(FuzzyEntitySet& out, const FuzzyEntitySet& other) const {
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = cfg_.conjunction == ConjunctionMode::product ? out[i] * other[i] : std::min(out[i], other[i]);
    }
  }

  void disjoin(FuzzyEntitySet& out, const FuzzyEntitySet& other) const {
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = cfg_.disjunction == DisjunctionMode::prob_sum ? out[i] + other[i] - out[i] * other[i]
                                                             : std::max(out[i], other[i]);
    }
  }

  void clamp(FuzzyEntitySet& v) const {
    for (auto& x : v) {
      if (x < 0.0 || x > 1.0 || x != x) {
        x = x > 1.0 ? 1.0 : 0.0;
        if (trace_ != nullptr) ++trace_->clamped;
      }
    }
  }

  const LinkPredictor& p_;
  const KnowledgeGraph* crisp_;
  const FuzzyConfig& cfg_;
  ExecTrace* trace_;
  std::size_t n_;
  std::vector<float> scratch_;
};

}  // namespace

FuzzyEntitySet execute(const ExecutionPlan& plan, const LinkPredictor& predictor,
                       const FuzzyConfig& cfg, ExecTrace* trace) {
  cfg.validate();
  return Executor(predictor, cfg, trace).run(plan);
}

std::size_t predicted_cardinality(const FuzzyEntitySet& v, const FuzzyConfig& cfg) {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [&](double x) { return x >= cfg.count_threshold; }));
}

}  // namespace kgq
