#pragma once

#include <stdexcept>
#include <string>

namespace pkin {

// Parameter outside the domain of a density or special function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Gradient requested where the coarse map is not differentiable.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NeRF frame with (numerically) collinear reference atoms.
struct DegenerateFrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evidence puts mass where the prior/reference has none.
struct SupportMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Robust fit on a sample with zero spread.
struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCdfError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Warmup never produced a non-divergent transition.
struct AdaptationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pkin
