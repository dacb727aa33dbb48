#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tgl {

// Bad numeric configuration: grid size, series truncation, tolerances, CLI input.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A nonlinear solve stopped before reaching the requested residual.
// Carries the max-norm residual after each outer iteration.
class solver_error : public std::runtime_error {
public:
  solver_error(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// A computed object violates one of its structural invariants.
class integrity_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An operation was invoked on data that cannot support it
// (e.g. missing derivative arrays, mismatched grids).
class contract_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace tgl
