#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgq {

/// Broad failure classes. The command-line tool maps these onto exit codes.
enum class ErrorKind {
  parse,             // malformed input file or document
  empty_graph,
  index,             // id out of range
  schema,            // query document does not match the schema
  binding,           // name not resolvable against a graph vocabulary
  unsupported_shape, // query shape not accepted by the operation
  disconnected_query,
  argument,
  predictor,
  divergence,
  exhaustion,        // sampler gave up
  empty_input,
  usage,
  internal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace kgq
