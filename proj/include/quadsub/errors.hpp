#pragma once

#include <stdexcept>
#include <string>

namespace quadsub {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The standing assumption S = {0} fails for this symbol; flow/weight/Galerkin
// bound checks must not proceed.
struct SingularSpaceNonTrivial : Error {
  int dim_s;
  explicit SingularSpaceNonTrivial(int dim)
      : Error("singular space has dimension " + std::to_string(dim) +
              ", expected 0"),
        dim_s(dim) {}
};

struct QuadratureNotConverged : Error {
  using Error::Error;
};

struct WeightBlowup : Error {
  double t_blowup;
  WeightBlowup(double t, double norm)
      : Error("weight norm " + std::to_string(norm) + " exceeds guard at t=" +
              std::to_string(t)),
        t_blowup(t) {}
};

struct TanSingular : Error {
  using Error::Error;
};

struct PlaneNotGraph : Error {
  using Error::Error;
};

struct DegenerateCriticalPoint : Error {
  using Error::Error;
};

struct ExpmNotConverged : Error {
  using Error::Error;
};

struct NoOrderFound : Error {
  using Error::Error;
};

struct InsufficientDecayRange : Error {
  using Error::Error;
};

struct CutoffTooSmall : Error {
  using Error::Error;
};

struct NoStableC0 : Error {
  using Error::Error;
};

}  // namespace quadsub
