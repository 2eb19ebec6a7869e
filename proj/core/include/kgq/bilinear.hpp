#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgq/kg_store.hpp"
#include "kgq/predictor.hpp"

namespace kgq {

enum class Optimizer { sgd, adam };

struct TrainConfig {
  std::size_t dim = 64;
  std::size_t epochs = 50;
  double learning_rate = 0.05;
  std::size_t negatives = 4;
  /// Positives per optimizer step; the step uses the mean gradient.
  std::size_t batch_size = 1;
  std::uint64_t seed = 7;
  Optimizer optimizer = Optimizer::adam;
  double l2 = 0.0;

  /// Throws argument errors for non-positive settings.
  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Diagonal bilinear scorer: score(r, a, b) = logistic(sum_i e_a[i] w_r[i] e_b[i]).
class BilinearModel final : public LinkPredictor {
 public:
  BilinearModel() = default;
  BilinearModel(std::size_t num_entities, std::size_t num_relations, std::size_t dim);

  /// Uniform(-1, 1) entries drawn from `seed`.
  static BilinearModel random_init(std::size_t num_entities, std::size_t num_relations,
                                   std::size_t dim, std::uint64_t seed);

  std::size_t num_entities() const override { return num_entities_; }
  std::size_t num_relations() const override { return num_relations_; }
  std::size_t dim() const noexcept { return dim_; }

  double logit(RelationId rel, EntityId head, EntityId tail) const;
  double score(RelationId rel, EntityId head, EntityId tail) const override;
  std::span<const float> row(RelationId rel, EntityId head,
                             std::vector<float>& scratch) const override;

  std::span<float> entity(EntityId e);
  std::span<const float> entity(EntityId e) const;
  std::span<float> relation(RelationId r);
  std::span<const float> relation(RelationId r) const;

  std::span<const float> entity_matrix() const noexcept { return entities_; }
  std::span<const float> relation_matrix() const noexcept { return relations_; }

  /// Free-form metadata written into the file header (seed, config, vocabulary
  /// fingerprints).
  nlohmann::json& metadata() noexcept { return metadata_; }
  const nlohmann::json& metadata() const noexcept { return metadata_; }

  /// "KGQB", u32 header length, JSON header, then the entity and relation
  /// matrices as row-major little-endian float32.
  void save(const std::filesystem::path& path) const;
  static BilinearModel load(const std::filesystem::path& path);

  /// Records the vocabulary fingerprints of `g` in the metadata.
  void bind_vocabulary(const KnowledgeGraph& g);
  /// Throws binding errors unless the model was trained on g's vocabulary.
  void check_vocabulary(const KnowledgeGraph& g) const;

  bool operator==(const BilinearModel& o) const {
    return dim_ == o.dim_ && entities_ == o.entities_ && relations_ == o.relations_;
  }

 private:
  std::size_t num_entities_ = 0;
  std::size_t num_relations_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> entities_;
  std::vector<float> relations_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

struct TrainResult {
  BilinearModel model;
  /// Per epoch: mean binary cross-entropy over all training triples plus a
  /// fixed set of corrupted triples drawn once before training.
  std::vector<double> loss_trace;
};

/// Logistic loss on observed triples (label 1) and triples whose head or tail
/// was replaced by a different uniformly drawn entity (label 0; collisions with
/// other true triples are not filtered). Single-threaded and bitwise reproducible
/// for a fixed seed. Throws divergence errors on non-finite losses.
TrainResult train(const KnowledgeGraph& g, const TrainConfig& cfg);

/// Binary cross-entropy of one labeled triple.
double example_loss(const BilinearModel& m, const Triple& t, double label);

/// Max relative error between the analytic gradient of example_loss and
/// central finite differences, over every parameter the example touches.
/// `epsilon` must lie in [1e-7, 1e-3].
double gradient_check(const BilinearModel& m, const Triple& t, double epsilon, double label = 1.0);

std::string vocabulary_fingerprint(const Dictionary& d);

}  // namespace kgq
