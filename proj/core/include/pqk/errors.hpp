#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pqk {

/// Thrown when an iterative evaluation fails to converge within its budget.
/// Carries the number of terms (or nodes) examined before giving up.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, std::size_t terms_examined)
      : std::runtime_error(what), terms_examined_(terms_examined) {}

  std::size_t terms_examined() const noexcept { return terms_examined_; }

 private:
  std::size_t terms_examined_;
};

}  // namespace pqk
