#include "bench_common.hpp"

#include "kgq/synthetic.hpp"

namespace kgq::bench {

ConjunctiveQuery triangle() {
  auto v = Term::var;
  return ConjunctiveQuery::make("x", {{"r00", v("x"), v("y")}, {"r01", v("y"), v("z")}, {"r02", v("z"), v("x")}});
}

ConjunctiveQuery square() {
  auto v = Term::var;
  return ConjunctiveQuery::make("x", {{"r00", v("x"), v("a")},
                                      {"r01", v("b"), v("a")},
                                      {"r02", v("b"), v("c")},
                                      {"r03", v("x"), v("c")}});
}

const GraphPair& graphs() {
  static const GraphPair pair = split_graph(synthetic_graph({}), 0.9, 1);
  return pair;
}

const BilinearModel& model() {
  static const BilinearModel m = [] {
    TrainConfig cfg;
    cfg.dim = 32;
    cfg.epochs = 2;
    return train(graphs().train, cfg).model;
  }();
  return m;
}

}  // namespace kgq::bench
