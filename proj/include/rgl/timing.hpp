#pragma once

#include <chrono>

namespace rgl {

/// Wall-clock seconds spent in each solver phase.
struct PhaseTimes {
  double matvec = 0.0;
  double orthogonalization = 0.0;
  double sketch = 0.0;
  double least_squares = 0.0;

  double total() const noexcept { return matvec + orthogonalization + sketch + least_squares; }
};

/// Adds the lifetime of the object to `slot` (no-op when slot is null).
class ScopedTimer {
 public:
  explicit ScopedTimer(double* slot) noexcept : slot_(slot), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (slot_ != nullptr) {
      *slot_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  double* slot_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rgl
