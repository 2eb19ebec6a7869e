#include "kgq/error.hpp"

namespace kgq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::empty_graph: return "empty graph";
    case ErrorKind::index: return "index error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::binding: return "binding error";
    case ErrorKind::unsupported_shape: return "unsupported query shape";
    case ErrorKind::disconnected_query: return "disconnected query";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::predictor: return "predictor error";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::exhaustion: return "sampler exhausted";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::usage: return "usage error";
    case ErrorKind::internal: return "internal error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace kgq
