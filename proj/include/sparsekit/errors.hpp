#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsekit {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Incompatible or empty matrix/vector dimensions.
struct dimension_error : error {
  using error::error;
};

// Invalid solver or scenario configuration (bad step size, m > N, ...).
struct config_error : error {
  using error::error;
};

// OMP sparsity budget exceeds the measurement count.
struct budget_error : error {
  using error::error;
};

// Non-finite values in numeric inputs.
struct input_error : error {
  using error::error;
};

// Least squares on a chosen support is rank deficient; carries the support.
struct degenerate_support_error : error {
  std::vector<std::size_t> support;
  degenerate_support_error(const std::string& what, std::vector<std::size_t> s)
      : error(what), support(std::move(s)) {}
};

// Exhaustive search refused: instance too large to enumerate.
struct enumeration_error : error {
  using error::error;
};

// Not enough history for a predictor.
struct insufficient_history_error : error {
  using error::error;
};

// Predicted weights requested without a prediction.
struct missing_prediction_error : error {
  using error::error;
};

// Gather protocol step invoked out of order.
struct protocol_error : error {
  using error::error;
};

// Operation requires a different network topology.
struct topology_error : error {
  using error::error;
};

// Update addressed to a node id outside the network.
struct update_error : error {
  using error::error;
};

// Model parameter outside its admissible range (|alpha| >= 1, ...).
struct model_error : error {
  using error::error;
};

// Config file parse or schema violation; message carries the key path.
struct parse_error : error {
  using error::error;
};

// File I/O failure; message carries path and cause.
struct io_error : error {
  using error::error;
};

}  // namespace sparsekit
