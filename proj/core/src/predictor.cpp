#include "kgq/predictor.hpp"

#include <algorithm>

#include "kgq/error.hpp"

namespace kgq {

void LinkPredictor::check_relation(RelationId rel) const {
  if (rel >= num_relations()) {
    fail(ErrorKind::predictor, "relation id " + std::to_string(rel) + " unknown to predictor");
  }
}

std::span<const float> LinkPredictor::row(RelationId rel, EntityId head,
                                          std::vector<float>& scratch) const {
  check_relation(rel);
  scratch.resize(num_entities());
  for (EntityId t = 0; t < scratch.size(); ++t) scratch[t] = static_cast<float>(score(rel, head, t));
  return scratch;
}

double CrispPredictor::score(RelationId rel, EntityId head, EntityId tail) const {
  check_relation(rel);
  return g_.contains(head, rel, tail) ? 1.0 : 0.0;
}

std::span<const float> CrispPredictor::row(RelationId rel, EntityId head,
                                           std::vector<float>& scratch) const {
  check_relation(rel);
  scratch.assign(num_entities(), 0.0F);
  for (auto t : g_.neighbors(head, rel, Direction::fwd)) scratch[t] = 1.0F;
  return scratch;
}

ScoreCache::ScoreCache(const LinkPredictor& inner, std::size_t max_bytes) : inner_(inner) {
  const std::size_t n = inner.num_entities();
  const std::size_t per_relation = std::max<std::size_t>(1, n * n * sizeof(float));
  cached_relations_ = std::min(inner.num_relations(), max_bytes / per_relation);
  matrices_.resize(cached_relations_);
  for (std::size_t r = 0; r < cached_relations_; ++r) once_.push_back(std::make_unique<std::once_flag>());
}

const std::vector<float>* ScoreCache::matrix(RelationId rel) const {
  if (rel >= cached_relations_) return nullptr;
  std::call_once(*once_[rel], [&] {
    const std::size_t n = num_entities();
    std::vector<float> m(n * n);
    std::vector<float> scratch;
    for (EntityId h = 0; h < n; ++h) {
      auto r = inner_.row(rel, h, scratch);
      std::copy(r.begin(), r.end(), m.begin() + static_cast<std::ptrdiff_t>(h * n));
    }
    matrices_[rel] = std::move(m);
  });
  return &matrices_[rel];
}

double ScoreCache::score(RelationId rel, EntityId head, EntityId tail) const {
  check_relation(rel);
  if (const auto* m = matrix(rel)) return (*m)[static_cast<std::size_t>(head) * num_entities() + tail];
  return inner_.score(rel, head, tail);
}

std::span<const float> ScoreCache::row(RelationId rel, EntityId head,
                                       std::vector<float>& scratch) const {
  check_relation(rel);
  if (const auto* m = matrix(rel)) {
    const std::size_t n = num_entities();
    return std::span<const float>(*m).subspan(static_cast<std::size_t>(head) * n, n);
  }
  return inner_.row(rel, head, scratch);
}

}  // namespace kgq
