#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qge/statevector.hpp"

namespace qge {

// obs = d . sigma + d0 * sigma_0
struct ObservableDecomposition {
  std::array<double, 3> d{0.0, 0.0, 0.0};
  double d0 = 0.0;
  double d_norm = 0.0;

  ComplexMatrix reconstruct() const;
};

ObservableDecomposition decompose(const ComplexMatrix& obs);

// Rotation U with U (d . sigma) U^H = |d| sigma_z. Throws DomainError for
// d = 0, where the rotation is undefined.
GateOp rotation_for(const ObservableDecomposition& dec, int qubit);

struct ShotEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  SampleCounts counts;  // joint counts in the rotated basis
};

enum class Estimator {
  joint,     // mean over shots of prod_q (|d| s_q + d0), s_q = +-1
  factored,  // prod_q (|d| (N0 - N1)/N + d0) from per-qubit marginals
};

ShotEstimate shot_expectation(const StateVector& state, std::span<const ComplexMatrix> obs_per_qubit,
                              std::uint64_t shots, std::uint64_t seed,
                              Estimator estimator = Estimator::joint);

// Count record: "shots <N> seed <s>" then "<bitstring> <count>" lines,
// bitstrings written qubit 0 first.
void write_counts(std::ostream& os, const SampleCounts& counts);
SampleCounts read_counts(std::istream& is);

}  // namespace qge
