#include "kgq/bilinear.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>
#include <vector>

#include "kgq/error.hpp"
#include "kgq/random.hpp"

namespace kgq {

namespace {

constexpr char kMagic[4] = {'K', 'G', 'Q', 'B'};

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// -[y log σ(s) + (1-y) log(1-σ(s))] written as softplus(s) - y s.
double logistic_loss(double s, double label) {
  const double softplus = std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
  return softplus - label * s;
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFU) << 24) | ((v & 0xFF00U) << 8) | ((v >> 8) & 0xFF00U) | (v >> 24);
  }
  return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return to_le(v);
}

void write_floats(std::ostream& out, std::span<const float> values) {
  for (float f : values) write_u32(out, std::bit_cast<std::uint32_t>(f));
}

void read_floats(std::istream& in, std::span<float> values) {
  for (float& f : values) f = std::bit_cast<float>(read_u32(in));
}

}  // namespace

void TrainConfig::validate() const {
  if (dim == 0) fail(ErrorKind::argument, "dim must be positive");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::argument, "learning rate must be positive");
  }
  if (negatives == 0) fail(ErrorKind::argument, "negatives per positive must be positive");
  if (batch_size == 0) fail(ErrorKind::argument, "batch size must be positive");
  if (l2 < 0 || !std::isfinite(l2)) fail(ErrorKind::argument, "l2 must be >= 0");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"dim", dim},
          {"epochs", epochs},
          {"learning_rate", learning_rate},
          {"negatives", negatives},
          {"batch_size", batch_size},
          {"seed", seed},
          {"optimizer", optimizer == Optimizer::adam ? "adam" : "sgd"},
          {"l2", l2}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.dim = j.value("dim", c.dim);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.negatives = j.value("negatives", c.negatives);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.optimizer = j.value("optimizer", std::string("adam")) == "sgd" ? Optimizer::sgd : Optimizer::adam;
  c.l2 = j.value("l2", c.l2);
  return c;
}

BilinearModel::BilinearModel(std::size_t num_entities, std::size_t num_relations, std::size_t dim)
    : num_entities_(num_entities),
      num_relations_(num_relations),
      dim_(dim),
      entities_(num_entities * dim, 0.0F),
      relations_(num_relations * dim, 0.0F) {}

BilinearModel BilinearModel::random_init(std::size_t num_entities, std::size_t num_relations,
                                         std::size_t dim, std::uint64_t seed) {
  BilinearModel m(num_entities, num_relations, dim);
  Rng rng(derive_seed(seed, {0x1417}));
  for (auto& v : m.entities_) v = static_cast<float>(uniform(rng, -1.0, 1.0));
  for (auto& v : m.relations_) v = static_cast<float>(uniform(rng, -1.0, 1.0));
  m.metadata_["seed"] = seed;
  return m;
}

std::span<float> BilinearModel::entity(EntityId e) {
  return std::span<float>(entities_).subspan(static_cast<std::size_t>(e) * dim_, dim_);
}
std::span<const float> BilinearModel::entity(EntityId e) const {
  return std::span<const float>(entities_).subspan(static_cast<std::size_t>(e) * dim_, dim_);
}
std::span<float> BilinearModel::relation(RelationId r) {
  return std::span<float>(relations_).subspan(static_cast<std::size_t>(r) * dim_, dim_);
}
std::span<const float> BilinearModel::relation(RelationId r) const {
  return std::span<const float>(relations_).subspan(static_cast<std::size_t>(r) * dim_, dim_);
}

double BilinearModel::logit(RelationId rel, EntityId head, EntityId tail) const {
  check_relation(rel);
  if (head >= num_entities_ || tail >= num_entities_) {
    fail(ErrorKind::index, "entity id out of range for model");
  }
  auto h = entity(head), w = relation(rel), t = entity(tail);
  double s = 0;
  for (std::size_t i = 0; i < dim_; ++i) s += static_cast<double>(h[i]) * w[i] * t[i];
  return s;
}

double BilinearModel::score(RelationId rel, EntityId head, EntityId tail) const {
  return sigmoid(logit(rel, head, tail));
}

std::span<const float> BilinearModel::row(RelationId rel, EntityId head,
                                          std::vector<float>& scratch) const {
  check_relation(rel);
  if (head >= num_entities_) fail(ErrorKind::index, "entity id out of range for model");
  std::vector<double> u(dim_);
  auto h = entity(head), w = relation(rel);
  for (std::size_t i = 0; i < dim_; ++i) u[i] = static_cast<double>(h[i]) * w[i];
  scratch.resize(num_entities_);
  for (EntityId t = 0; t < num_entities_; ++t) {
    const float* e = entities_.data() + static_cast<std::size_t>(t) * dim_;
    double s = 0;
    for (std::size_t i = 0; i < dim_; ++i) s += u[i] * e[i];
    scratch[t] = static_cast<float>(sigmoid(s));
  }
  return scratch;
}

void BilinearModel::save(const std::filesystem::path& path) const {
  nlohmann::json header = metadata_;
  header["format"] = "kgq-bilinear";
  header["version"] = 1;
  header["num_entities"] = num_entities_;
  header["num_relations"] = num_relations_;
  header["dim"] = dim_;
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::parse, "cannot write '" + path.string() + "'");
  out.write(kMagic, sizeof kMagic);
  write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_floats(out, entities_);
  write_floats(out, relations_);
  if (!out) fail(ErrorKind::parse, "failed writing '" + path.string() + "'");
}

BilinearModel BilinearModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::parse, "cannot open model '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    fail(ErrorKind::parse, "'" + path.string() + "' is not a kgq model file");
  }
  const auto len = read_u32(in);
  std::string text(len, '\0');
  in.read(text.data(), len);
  if (!in) fail(ErrorKind::parse, "truncated model header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse, std::string("model header: ") + e.what());
  }
  if (header.value("format", "") != "kgq-bilinear" || header.value("version", 0) != 1) {
    fail(ErrorKind::parse, "unsupported model format");
  }
  BilinearModel m(header.at("num_entities").get<std::size_t>(),
                  header.at("num_relations").get<std::size_t>(), header.at("dim").get<std::size_t>());
  read_floats(in, m.entities_);
  read_floats(in, m.relations_);
  if (!in) fail(ErrorKind::parse, "truncated model matrices");
  for (const char* k : {"format", "version", "num_entities", "num_relations", "dim"}) header.erase(k);
  m.metadata_ = std::move(header);
  return m;
}

std::string vocabulary_fingerprint(const Dictionary& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& name : d.names()) {
    for (unsigned char c : name) mix(c);
    mix(0);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::to_string(d.size()) + ":" + buf;
}

void BilinearModel::bind_vocabulary(const KnowledgeGraph& g) {
  metadata_["entities"] = vocabulary_fingerprint(g.entities());
  metadata_["relations"] = vocabulary_fingerprint(g.relations());
}

void BilinearModel::check_vocabulary(const KnowledgeGraph& g) const {
  if (num_entities_ != g.num_entities() || num_relations_ != g.num_relations()) {
    fail(ErrorKind::binding, "model dimensions (" + std::to_string(num_entities_) + " entities, " +
                                 std::to_string(num_relations_) +
                                 " relations) do not match the graph");
  }
  if (metadata_.contains("entities") &&
      (metadata_["entities"] != vocabulary_fingerprint(g.entities()) ||
       metadata_.value("relations", "") != vocabulary_fingerprint(g.relations()))) {
    fail(ErrorKind::binding, "model was trained on a different vocabulary");
  }
}

double example_loss(const BilinearModel& m, const Triple& t, double label) {
  return logistic_loss(m.logit(t.relation, t.head, t.tail), label);
}

namespace {

// Gradient of the loss of one example w.r.t. its three parameter rows.
struct ExampleGrad {
  std::vector<double> head, rel, tail;
  double loss = 0;
};

ExampleGrad example_gradient(const BilinearModel& m, const Triple& t, double label) {
  const auto k = m.dim();
  auto h = m.entity(t.head), w = m.relation(t.relation), b = m.entity(t.tail);
  double s = 0;
  for (std::size_t i = 0; i < k; ++i) s += static_cast<double>(h[i]) * w[i] * b[i];
  const double g = sigmoid(s) - label;
  ExampleGrad out{std::vector<double>(k), std::vector<double>(k), std::vector<double>(k),
                  logistic_loss(s, label)};
  for (std::size_t i = 0; i < k; ++i) {
    out.head[i] = g * static_cast<double>(w[i]) * b[i];
    out.rel[i] = g * static_cast<double>(h[i]) * b[i];
    out.tail[i] = g * static_cast<double>(h[i]) * w[i];
  }
  return out;
}

class Updater {
 public:
  Updater(BilinearModel& m, const TrainConfig& cfg) : m_(m), cfg_(cfg) {
    if (cfg.optimizer == Optimizer::adam) {
      const auto ne = m.entity_matrix().size(), nr = m.relation_matrix().size();
      ent_m_.assign(ne, 0.0);
      ent_v_.assign(ne, 0.0);
      rel_m_.assign(nr, 0.0);
      rel_v_.assign(nr, 0.0);
    }
  }

  // Gradients of one mini-batch, accumulated per row.
  void add(bool is_entity, std::uint32_t id, const std::vector<double>& grad) {
    const std::uint64_t key = (std::uint64_t{is_entity} << 32) | id;
    auto [it, fresh] = index_.try_emplace(key, pending_.size());
    if (fresh) {
      pending_.push_back({is_entity, id, grad});
      return;
    }
    auto& p = pending_[it->second].grad;
    for (std::size_t i = 0; i < grad.size(); ++i) p[i] += grad[i];
  }

  // One optimizer step on the mean gradient of `batch` positives.
  void apply(std::size_t batch) {
    ++step_;
    const double inv = 1.0 / static_cast<double>(batch);
    const double lr = cfg_.learning_rate;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (auto& p : pending_) {
      auto params = p.is_entity ? m_.entity(p.id) : m_.relation(p.id);
      const std::size_t base = static_cast<std::size_t>(p.id) * m_.dim();
      for (std::size_t i = 0; i < params.size(); ++i) {
        double g = p.grad[i] * inv + cfg_.l2 * params[i];
        double delta;
        if (cfg_.optimizer == Optimizer::adam) {
          double& mm = (p.is_entity ? ent_m_ : rel_m_)[base + i];
          double& vv = (p.is_entity ? ent_v_ : rel_v_)[base + i];
          mm = b1 * mm + (1 - b1) * g;
          vv = b2 * vv + (1 - b2) * g * g;
          delta = lr * (mm / c1) / (std::sqrt(vv / c2) + eps);
        } else {
          delta = lr * g;
        }
        params[i] = static_cast<float>(params[i] - delta);
      }
    }
    pending_.clear();
    index_.clear();
  }

 private:
  struct Pending {
    bool is_entity;
    std::uint32_t id;
    std::vector<double> grad;
  };
  BilinearModel& m_;
  const TrainConfig& cfg_;
  std::vector<Pending> pending_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<double> ent_m_, ent_v_, rel_m_, rel_v_;
  std::uint64_t step_ = 0;
};

// Replaces the head or the tail by a different entity (unless there is only
// one). Other true triples are not filtered out.
Triple corrupt(const Triple& t, std::size_t num_entities, Rng& rng) {
  Triple c = t;
  EntityId& side = coin(rng) ? c.head : c.tail;
  if (num_entities < 2) return c;
  auto e = static_cast<EntityId>(uniform_index(rng, num_entities - 1));
  side = e >= side ? e + 1 : e;
  return c;
}

}  // namespace

TrainResult train(const KnowledgeGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  if (g.num_edges() == 0) fail(ErrorKind::empty_graph, "cannot train on a graph without edges");
  TrainResult result;
  result.model = BilinearModel::random_init(g.num_entities(), g.num_relations(), cfg.dim, cfg.seed);
  BilinearModel& m = result.model;
  m.metadata()["config"] = cfg.to_json();
  m.bind_vocabulary(g);

  std::vector<Triple> positives(g.edges().begin(), g.edges().end());
  Rng monitor_rng(derive_seed(cfg.seed, {0x3301}));
  std::vector<Triple> monitor_negatives;
  monitor_negatives.reserve(positives.size());
  for (const auto& t : positives) monitor_negatives.push_back(corrupt(t, g.num_entities(), monitor_rng));

  Rng rng(derive_seed(cfg.seed, {0x7a11}));
  Updater updater(m, cfg);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(positives, rng);
    for (std::size_t n = 0; n < positives.size(); ++n) {
      const Triple& pos = positives[n];
      auto push = [&](const Triple& t, double label) {
        auto grad = example_gradient(m, t, label);
        updater.add(true, t.head, grad.head);
        updater.add(false, t.relation, grad.rel);
        updater.add(true, t.tail, grad.tail);
      };
      push(pos, 1.0);
      for (std::size_t k = 0; k < cfg.negatives; ++k) push(corrupt(pos, g.num_entities(), rng), 0.0);
      const std::size_t in_batch = n % cfg.batch_size + 1;
      if (in_batch == cfg.batch_size || n + 1 == positives.size()) updater.apply(in_batch);
    }

    double total = 0;
    for (const auto& t : positives) total += example_loss(m, t, 1.0);
    for (const auto& t : monitor_negatives) total += example_loss(m, t, 0.0);
    const double mean = total / static_cast<double>(positives.size() + monitor_negatives.size());
    if (!std::isfinite(mean)) {
      fail(ErrorKind::divergence, "non-finite loss at epoch " + std::to_string(epoch + 1));
    }
    result.loss_trace.push_back(mean);
  }
  return result;
}

double gradient_check(const BilinearModel& m, const Triple& t, double epsilon, double label) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    fail(ErrorKind::argument, "epsilon must lie in [1e-7, 1e-3]");
  }
  const auto k = m.dim();
  auto grad = example_gradient(m, t, label);

  // Double-precision copies of the touched rows; the loss is recomputed from
  // these so perturbations are not rounded to float.
  std::vector<double> h(m.entity(t.head).begin(), m.entity(t.head).end());
  std::vector<double> w(m.relation(t.relation).begin(), m.relation(t.relation).end());
  std::vector<double> b(m.entity(t.tail).begin(), m.entity(t.tail).end());
  const bool shared = t.head == t.tail;
  auto loss = [&] {
    const auto& tail = shared ? h : b;
    double s = 0;
    for (std::size_t i = 0; i < k; ++i) s += h[i] * w[i] * tail[i];
    return logistic_loss(s, label);
  };

  double worst = 0;
  auto check = [&](std::vector<double>& params, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < k; ++i) {
      const double saved = params[i];
      params[i] = saved + epsilon;
      const double up = loss();
      params[i] = saved - epsilon;
      const double down = loss();
      params[i] = saved;
      const double numeric = (up - down) / (2 * epsilon);
      const double scale = std::max(std::abs(analytic[i]), std::abs(numeric));
      const double err = scale < 1e-10 ? std::abs(analytic[i] - numeric)
                                       : std::abs(analytic[i] - numeric) / scale;
      worst = std::max(worst, err);
    }
  };
  if (shared) {
    std::vector<double> both(k);
    for (std::size_t i = 0; i < k; ++i) both[i] = grad.head[i] + grad.tail[i];
    check(h, both);
  } else {
    check(h, grad.head);
    check(b, grad.tail);
  }
  check(w, grad.rel);
  return worst;
}

}  // namespace kgq
