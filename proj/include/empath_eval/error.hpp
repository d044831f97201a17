#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace empath_eval {

/// Malformed or inconsistent input data (schema violations, bad counts).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A classifier, chatbot or training backend failed or is unavailable.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by classify_* when a backend fails part-way. `unclassified` lists
/// every input index that did not receive a verdict.
class ClassificationError : public BackendError {
 public:
  ClassificationError(const std::string& what, std::vector<std::size_t> unclassified)
      : BackendError(what), unclassified_(std::move(unclassified)) {}

  const std::vector<std::size_t>& unclassified() const noexcept { return unclassified_; }

 private:
  std::vector<std::size_t> unclassified_;
};

}  // namespace empath_eval
