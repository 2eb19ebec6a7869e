#pragma once

#include "kgq/bilinear.hpp"
#include "kgq/kg_store.hpp"
#include "kgq/query.hpp"

namespace kgq::bench {

/// R0(x,y), R1(y,z), R2(z,x).
ConjunctiveQuery triangle();
/// Four-cycle through x with alternating orientation.
ConjunctiveQuery square();

/// 1000 entities / 20 relations / 10000 edges, 90/10 split, built once.
const GraphPair& graphs();

/// Small trained model over graphs().train, built once.
const BilinearModel& model();

}  // namespace kgq::bench
