#include "qge/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "qge/error.hpp"

namespace qge {

namespace {

constexpr double kNormTol = 1e-10;
constexpr int kMaxQubits = 30;

int qubits_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    std::ostringstream os;
    os << "state dimension " << dim << " is not a power of two >= 2";
    throw DimensionError(os.str());
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

void check_qubit(int q, int n, const char* where) {
  if (q < 0 || q >= n) {
    std::ostringstream os;
    os << where << ": qubit index " << q << " out of range for " << n << " qubits";
    throw IndexError(os.str());
  }
}

void check_targets(std::span<const int> targets, int n, const char* where) {
  std::set<int> seen;
  for (int q : targets) {
    check_qubit(q, n, where);
    if (!seen.insert(q).second) {
      std::ostringstream os;
      os << where << ": duplicate qubit index " << q;
      throw IndexError(os.str());
    }
  }
}

std::uint64_t bit_mask(int qubit, int n) { return std::uint64_t{1} << (n - 1 - qubit); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw DimensionError("StateVector: qubit count must be in [1, 30]");
  amps_ = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
  amps_(0) = 1.0;
}

StateVector::StateVector(ComplexVector amplitudes)
    : n_qubits_(qubits_for_dim(amplitudes.size())), amps_(std::move(amplitudes)) {
  refresh_flag();
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw IndexError("StateVector::basis: index out of range");
  s.amps_(0) = 0.0;
  s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

void StateVector::refresh_flag() { unnormalized_ = std::abs(amps_.norm() - 1.0) > kNormTol; }

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DomainError("cannot normalize the zero vector");
  return StateVector(ComplexVector(amps_ / n));
}

void StateVector::require_normalized(const char* where) const {
  if (unnormalized_) {
    std::ostringstream os;
    os << where << ": state is not normalized (norm " << std::setprecision(17) << norm() << ")";
    throw DomainError(os.str());
  }
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  ComplexVector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x(i) * y;
  return StateVector(std::move(out));
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

int bit_of(std::uint64_t index, int qubit, int n_qubits) {
  return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1U);
}

GateOp::GateOp(ComplexMatrix m, std::vector<int> t) : matrix(std::move(m)), targets(std::move(t)) {
  const auto dim = matrix.rows();
  if (!is_square(matrix) || (Eigen::Index{1} << targets.size()) != dim)
    throw DimensionError("GateOp: matrix dimension does not match target count");
  if (!is_unitary(matrix, 1e-10)) throw DomainError("GateOp: matrix is not unitary");
}

namespace gates {

ComplexMatrix rx_matrix(double theta) {
  return std::cos(theta / 2) * pauli::I() - kI * std::sin(theta / 2) * pauli::X();
}
ComplexMatrix ry_matrix(double theta) {
  return std::cos(theta / 2) * pauli::I() - kI * std::sin(theta / 2) * pauli::Y();
}
ComplexMatrix rz_matrix(double theta) {
  return std::cos(theta / 2) * pauli::I() - kI * std::sin(theta / 2) * pauli::Z();
}

GateOp hadamard(int q) {
  ComplexMatrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return GateOp(h / std::sqrt(2.0), {q});
}
GateOp pauli_x(int q) { return GateOp(pauli::X(), {q}); }
GateOp pauli_y(int q) { return GateOp(pauli::Y(), {q}); }
GateOp pauli_z(int q) { return GateOp(pauli::Z(), {q}); }
GateOp rx(double theta, int q) { return GateOp(rx_matrix(theta), {q}); }
GateOp ry(double theta, int q) { return GateOp(ry_matrix(theta), {q}); }
GateOp rz(double theta, int q) { return GateOp(rz_matrix(theta), {q}); }

GateOp swap(int a, int b) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return GateOp(m, {a, b});
}

GateOp fredkin(int control, int a, int b) {
  ComplexMatrix m = ComplexMatrix::Identity(8, 8);
  // |1 0 1> <-> |1 1 0>
  m(5, 5) = m(6, 6) = 0.0;
  m(5, 6) = m(6, 5) = 1.0;
  return GateOp(m, {control, a, b});
}

}  // namespace gates

StateVector apply_matrix(StateVector state, const ComplexMatrix& m, std::span<const int> targets) {
  const int n = state.n_qubits();
  check_targets(targets, n, "apply");
  const auto k = static_cast<int>(targets.size());
  const Eigen::Index sub = Eigen::Index{1} << k;
  if (m.rows() != sub || m.cols() != sub)
    throw DimensionError("apply: matrix dimension does not match target count");

  std::vector<std::uint64_t> offsets(sub, 0);
  std::uint64_t target_mask = 0;
  for (Eigen::Index s = 0; s < sub; ++s)
    for (int j = 0; j < k; ++j)
      if ((s >> (k - 1 - j)) & 1) offsets[s] |= bit_mask(targets[j], n);
  for (int q : targets) target_mask |= bit_mask(q, n);

  state.transform([&](ComplexVector& amps) {
    ComplexVector local(sub);
    const auto dim = static_cast<std::uint64_t>(amps.size());
    for (std::uint64_t base = 0; base < dim; ++base) {
      if (base & target_mask) continue;
      for (Eigen::Index s = 0; s < sub; ++s) local(s) = amps(base | offsets[s]);
      const ComplexVector out = m * local;
      for (Eigen::Index s = 0; s < sub; ++s) amps(base | offsets[s]) = out(s);
    }
  });
  return state;
}

StateVector apply(StateVector state, const GateOp& gate) {
  return apply_matrix(std::move(state), gate.matrix, gate.targets);
}

StateVector controlled_register_swap(StateVector state, int control, std::span<const int> reg_a,
                                     std::span<const int> reg_b) {
  const int n = state.n_qubits();
  if (reg_a.size() != reg_b.size())
    throw IndexError("controlled_register_swap: registers differ in length");
  std::vector<int> all(reg_a.begin(), reg_a.end());
  all.insert(all.end(), reg_b.begin(), reg_b.end());
  all.push_back(control);
  check_targets(all, n, "controlled_register_swap");

  const std::uint64_t cmask = bit_mask(control, n);
  state.transform([&](ComplexVector& amps) {
    const auto dim = static_cast<std::uint64_t>(amps.size());
    for (std::uint64_t i = 0; i < dim; ++i) {
      if (!(i & cmask)) continue;
      std::uint64_t j = i;
      for (std::size_t r = 0; r < reg_a.size(); ++r) {
        const std::uint64_t ma = bit_mask(reg_a[r], n), mb = bit_mask(reg_b[r], n);
        const bool ba = i & ma, bb = i & mb;
        j &= ~(ma | mb);
        if (ba) j |= mb;
        if (bb) j |= ma;
      }
      if (i < j) std::swap(amps(static_cast<Eigen::Index>(i)), amps(static_cast<Eigen::Index>(j)));
    }
  });
  return state;
}

double expectation(const StateVector& state, std::span<const ComplexMatrix> per_qubit_ops) {
  state.require_normalized("expectation");
  const int n = state.n_qubits();
  if (static_cast<int>(per_qubit_ops.size()) != n)
    throw DimensionError("expectation: need exactly one operator per qubit");
  StateVector image = state;
  double scale = 1.0;
  for (int q = 0; q < n; ++q) {
    const ComplexMatrix& op = per_qubit_ops[q];
    if (op.rows() != 2 || op.cols() != 2)
      throw DimensionError("expectation: per-qubit operators must be 2x2");
    if (!is_hermitian(op, 1e-10)) {
      std::ostringstream os;
      os << "expectation: operator on qubit " << q << " is not Hermitian";
      throw DomainError(os.str());
    }
    scale *= std::max(1.0, operator_norm(op));
    if (op.isIdentity(0.0)) continue;
    const int target[] = {q};
    image = apply_matrix(std::move(image), op, target);
  }
  const cplx value = inner(state, image);
  if (std::abs(value.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "expectation: imaginary residue " << value.imag() << " exceeds tolerance";
    throw NumericalError(os.str());
  }
  return value.real();
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SampleCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw DomainError("sample: shots must be positive");
  state.require_normalized("sample");
  const auto& amps = state.amplitudes();
  std::vector<double> cumulative(static_cast<std::size_t>(amps.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    total += std::norm(amps(i));
    cumulative[static_cast<std::size_t>(i)] = total;
  }

  SampleCounts counts;
  counts.shots = shots;
  counts.seed = seed;
  counts.n_qubits = state.n_qubits();
  counts.per_qubit.assign(static_cast<std::size_t>(state.n_qubits()), {0, 0});

  Rng rng(seed);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
      // u landed on the rounding slack above the last cumulative value.
      it = std::lower_bound(cumulative.begin(), cumulative.end(), cumulative.back());
    }
    ++counts.joint[static_cast<std::uint64_t>(it - cumulative.begin())];
  }
  for (const auto& [index, count] : counts.joint)
    for (int q = 0; q < counts.n_qubits; ++q)
      counts.per_qubit[static_cast<std::size_t>(q)][bit_of(index, q, counts.n_qubits)] += count;
  return counts;
}

PostselectResult postselect(const StateVector& state, int qubit, int outcome) {
  state.require_normalized("postselect");
  check_qubit(qubit, state.n_qubits(), "postselect");
  if (outcome != 0 && outcome != 1) throw DomainError("postselect: outcome must be 0 or 1");
  const int n = state.n_qubits();
  ComplexVector projected = state.amplitudes();
  for (Eigen::Index i = 0; i < projected.size(); ++i)
    if (bit_of(static_cast<std::uint64_t>(i), qubit, n) != outcome) projected(i) = 0.0;
  const double probability = projected.squaredNorm();
  if (probability < 1e-14) {
    std::ostringstream os;
    os << "postselect: outcome " << outcome << " on qubit " << qubit << " has probability "
       << probability;
    throw PostselectionError(os.str());
  }
  projected /= std::sqrt(probability);
  return {StateVector(std::move(projected)), std::min(1.0, probability)};
}

StateVector remove_qubit(const StateVector& state, int qubit, double tol) {
  const int n = state.n_qubits();
  check_qubit(qubit, n, "remove_qubit");
  if (n < 2) throw DimensionError("remove_qubit: cannot remove the only qubit");
  const auto& amps = state.amplitudes();
  double weight[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < amps.size(); ++i)
    weight[bit_of(static_cast<std::uint64_t>(i), qubit, n)] += std::norm(amps(i));
  const int keep = weight[1] > weight[0] ? 1 : 0;
  if (weight[1 - keep] > tol * tol * (weight[0] + weight[1]))
    throw DomainError("remove_qubit: qubit is entangled or in superposition");

  ComplexVector out(amps.size() / 2);
  const std::uint64_t low_mask = bit_mask(qubit, n) - 1;
  for (Eigen::Index r = 0; r < out.size(); ++r) {
    const auto ru = static_cast<std::uint64_t>(r);
    const std::uint64_t high = (ru & ~low_mask) << 1;
    const std::uint64_t full = high | (ru & low_mask) |
                               (keep ? bit_mask(qubit, n) : std::uint64_t{0});
    out(r) = amps(static_cast<Eigen::Index>(full));
  }
  return StateVector(std::move(out));
}

void write_state(std::ostream& os, const StateVector& state) {
  os << "nqubits " << state.n_qubits() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < state.dim(); ++i) os << state[i].real() << ' ' << state[i].imag() << '\n';
}

StateVector read_state(std::istream& is) {
  std::string tag;
  int n = 0;
  if (!(is >> tag >> n) || tag != "nqubits") throw IoError("state file: expected 'nqubits <n>' header");
  if (n < 1 || n > kMaxQubits) throw IoError("state file: qubit count out of range");
  ComplexVector amps(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    double re = 0.0, im = 0.0;
    if (!(is >> re >> im)) {
      std::ostringstream os;
      os << "state file: expected " << amps.size() << " amplitude lines, got " << i;
      throw IoError(os.str());
    }
    amps(i) = {re, im};
  }
  return StateVector(std::move(amps));
}

StateVector load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file " + path);
  return read_state(in);
}

void save_state(const std::string& path, const StateVector& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write state file " + path);
  write_state(out, state);
}

}  // namespace qge
