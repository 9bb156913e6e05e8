#include "qge/readout.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qge/error.hpp"

namespace qge {

ComplexMatrix ObservableDecomposition::reconstruct() const {
  return d[0] * pauli::X() + d[1] * pauli::Y() + d[2] * pauli::Z() + d0 * pauli::I();
}

ObservableDecomposition decompose(const ComplexMatrix& obs) {
  if (obs.rows() != 2 || obs.cols() != 2) throw DimensionError("decompose: expected a 2x2 matrix");
  if (!is_hermitian(obs, 1e-10)) throw DomainError("decompose: observable is not Hermitian");
  ObservableDecomposition dec;
  dec.d[0] = 0.5 * (obs * pauli::X()).trace().real();
  dec.d[1] = 0.5 * (obs * pauli::Y()).trace().real();
  dec.d[2] = 0.5 * (obs * pauli::Z()).trace().real();
  dec.d0 = 0.5 * obs.trace().real();
  dec.d_norm = std::hypot(dec.d[0], dec.d[1], dec.d[2]);
  return dec;
}

GateOp rotation_for(const ObservableDecomposition& dec, int qubit) {
  if (dec.d_norm == 0.0)
    throw DomainError("rotation_for: observable is proportional to the identity");
  const double cos_theta = std::clamp(dec.d[2] / dec.d_norm, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  // Axis d x z / sin(theta) = (d_y, -d_x, 0) / |(d_x, d_y)|.
  const double transverse = std::hypot(dec.d[0], dec.d[1]);
  double ux = 0.0, uy = 1.0;  // antiparallel case: fixed to the y-axis
  if (transverse > 1e-14 * dec.d_norm) {
    ux = dec.d[1] / transverse;
    uy = -dec.d[0] / transverse;
  } else if (cos_theta > 0.0) {
    return GateOp(pauli::I(), {qubit});
  }
  const ComplexMatrix axis = ux * pauli::X() + uy * pauli::Y();
  const ComplexMatrix u = std::cos(theta / 2) * pauli::I() - kI * std::sin(theta / 2) * axis;
  return GateOp(u, {qubit});
}

ShotEstimate shot_expectation(const StateVector& state, std::span<const ComplexMatrix> obs_per_qubit,
                              std::uint64_t shots, std::uint64_t seed, Estimator estimator) {
  const int n = state.n_qubits();
  if (static_cast<int>(obs_per_qubit.size()) != n)
    throw DimensionError("shot_expectation: need exactly one observable per qubit");

  std::vector<ObservableDecomposition> decs;
  StateVector rotated = state;
  for (int q = 0; q < n; ++q) {
    decs.push_back(decompose(obs_per_qubit[q]));
    if (decs.back().d_norm > 0.0) rotated = apply(std::move(rotated), rotation_for(decs.back(), q));
  }

  ShotEstimate result;
  result.counts = sample(rotated, shots, seed);
  const auto n_shots = static_cast<double>(shots);

  if (estimator == Estimator::joint) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [index, count] : result.counts.joint) {
      double value = 1.0;
      for (int q = 0; q < n; ++q) {
        const double sign = bit_of(index, q, n) == 0 ? 1.0 : -1.0;
        value *= decs[q].d_norm * sign + decs[q].d0;
      }
      sum += value * static_cast<double>(count);
      sum_sq += value * value * static_cast<double>(count);
    }
    result.estimate = sum / n_shots;
    const double var = std::max(0.0, sum_sq / n_shots - result.estimate * result.estimate);
    result.std_error = shots > 1 ? std::sqrt(var / (n_shots - 1.0)) : 0.0;
    return result;
  }

  std::vector<double> factor(n), factor_var(n);
  for (int q = 0; q < n; ++q) {
    const auto& nq = result.counts.per_qubit[q];
    const double m = (static_cast<double>(nq[0]) - static_cast<double>(nq[1])) / n_shots;
    factor[q] = decs[q].d_norm * m + decs[q].d0;
    factor_var[q] = decs[q].d_norm * decs[q].d_norm * std::max(0.0, 1.0 - m * m) / n_shots;
  }
  double product = 1.0;
  for (double f : factor) product *= f;
  double var = 0.0;
  for (int q = 0; q < n; ++q) {
    double others = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != q) others *= factor[j];
    var += others * others * factor_var[q];
  }
  result.estimate = product;
  result.std_error = std::sqrt(var);
  return result;
}

void write_counts(std::ostream& os, const SampleCounts& counts) {
  os << "shots " << counts.shots << " seed " << counts.seed << '\n';
  for (const auto& [index, count] : counts.joint) {
    for (int q = 0; q < counts.n_qubits; ++q) os << bit_of(index, q, counts.n_qubits);
    os << ' ' << count << '\n';
  }
}

SampleCounts read_counts(std::istream& is) {
  SampleCounts counts;
  std::string shots_tag, seed_tag;
  if (!(is >> shots_tag >> counts.shots >> seed_tag >> counts.seed) || shots_tag != "shots" ||
      seed_tag != "seed")
    throw IoError("count record: expected 'shots <N> seed <s>' header");
  std::string bits;
  std::uint64_t count = 0, total = 0;
  while (is >> bits >> count) {
    if (counts.n_qubits == 0) {
      counts.n_qubits = static_cast<int>(bits.size());
      counts.per_qubit.assign(bits.size(), {0, 0});
    } else if (static_cast<int>(bits.size()) != counts.n_qubits) {
      throw IoError("count record: inconsistent bitstring length");
    }
    std::uint64_t index = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw IoError("count record: malformed bitstring " + bits);
      index = (index << 1) | static_cast<std::uint64_t>(c - '0');
    }
    counts.joint[index] += count;
    for (int q = 0; q < counts.n_qubits; ++q) counts.per_qubit[q][bits[q] - '0'] += count;
    total += count;
  }
  if (total != counts.shots) throw IoError("count record: counts do not sum to the shot total");
  return counts;
}

}  // namespace qge
