#include "qge/genexp.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qge/error.hpp"
#include "qge/readout.hpp"

namespace qge {

std::vector<int> SwapTestLayout::system_a() const {
  std::vector<int> q(n);
  for (int i = 0; i < n; ++i) q[i] = i;
  return q;
}

std::vector<int> SwapTestLayout::system_b() const {
  std::vector<int> q(n);
  for (int i = 0; i < n; ++i) q[i] = n + i;
  return q;
}

StateVector build_swap_test_state(const StateVector& psi1, const StateVector& psi2) {
  if (psi1.n_qubits() != psi2.n_qubits())
    throw DomainError("build_swap_test_state: states have different qubit counts");
  psi1.require_normalized("build_swap_test_state");
  psi2.require_normalized("build_swap_test_state");
  const SwapTestLayout layout{psi1.n_qubits()};
  StateVector state = tensor(tensor(psi1, psi2), StateVector(1));
  state = apply(std::move(state), gates::hadamard(layout.ancilla()));
  return controlled_register_swap(std::move(state), layout.ancilla(), layout.system_a(),
                                  layout.system_b());
}

namespace {

struct Measured {
  double value;
  double std_error;
};

Measured measure(const StateVector& state, const std::vector<ComplexMatrix>& ops,
                 const MeasurementMode& mode, std::uint64_t stream) {
  if (std::holds_alternative<ExactMode>(mode)) return {expectation(state, ops), 0.0};
  const auto& sampled = std::get<SampledMode>(mode);
  const ShotEstimate est =
      shot_expectation(state, ops, sampled.shots, derive_seed(sampled.seed, stream));
  return {est.estimate, est.std_error};
}

std::vector<ComplexMatrix> circuit_observable(const std::vector<ComplexMatrix>& on_a,
                                              const std::vector<ComplexMatrix>& on_b,
                                              const ComplexMatrix& on_ancilla) {
  std::vector<ComplexMatrix> ops(on_a);
  ops.insert(ops.end(), on_b.begin(), on_b.end());
  ops.push_back(on_ancilla);
  return ops;
}

}  // namespace

GenExpResult generalized_expectation(const GenExpRequest& req) {
  const int n = req.psi1.n_qubits();
  if (static_cast<int>(req.O.size()) != n)
    throw DimensionError("generalized_expectation: O needs one factor per qubit");
  std::vector<ComplexMatrix> oprime = req.Oprime;
  if (oprime.empty()) oprime.assign(n, pauli::I());
  if (static_cast<int>(oprime.size()) != n)
    throw DimensionError("generalized_expectation: O' needs one factor per qubit");

  const StateVector swapped = build_swap_test_state(req.psi1, req.psi2);

  // Each expectation gets its own seed stream, as separate rotated
  // measurements would in an experiment.
  const Measured num_x = measure(swapped, circuit_observable(req.O, oprime, pauli::X()), req.mode, 0);
  const Measured num_y = measure(swapped, circuit_observable(req.O, oprime, pauli::Y()), req.mode, 1);
  const Measured den = measure(swapped, circuit_observable(oprime, oprime, pauli::X()), req.mode, 2);

  const bool exact = std::holds_alternative<ExactMode>(req.mode);
  if ((exact && den.value < 1e-12) || (!exact && den.value <= 3.0 * den.std_error)) {
    std::ostringstream os;
    os << "generalized_expectation: <psi1|O'|psi2> vanishes (|.|^2 = " << den.value;
    if (!exact) os << " +- " << den.std_error;
    os << "); choose a different O'";
    throw OrthogonalityError(os.str());
  }

  GenExpResult result;
  result.numerator_x = num_x.value;
  result.numerator_y = num_y.value;
  result.denominator = den.value;
  result.value = {num_x.value / den.value, num_y.value / den.value};
  if (!exact) {
    const double c2 = den.value * den.value;
    auto ratio_error = [&](const Measured& a) {
      return std::sqrt(a.std_error * a.std_error / c2 +
                       a.value * a.value * den.std_error * den.std_error / (c2 * c2));
    };
    result.std_error = {ratio_error(num_x), ratio_error(num_y)};
  }
  return result;
}

std::vector<ComplexMatrix> read_observables(std::istream& is) {
  std::vector<ComplexMatrix> ops;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    if (tokens.size() == 1) {
      const std::string& name = tokens[0];
      if (name == "I") ops.push_back(pauli::I());
      else if (name == "X") ops.push_back(pauli::X());
      else if (name == "Y") ops.push_back(pauli::Y());
      else if (name == "Z") ops.push_back(pauli::Z());
      else throw IoError("observable file line " + std::to_string(line_no) + ": unknown name " + name);
      continue;
    }

    std::vector<double> values;
    for (const auto& tok : tokens) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw IoError("observable file line " + std::to_string(line_no) + ": bad number " + tok);
      }
    }
    ComplexMatrix m(2, 2);
    if (values.size() == 4) {
      m << values[0], values[1], values[2], values[3];
    } else if (values.size() == 8) {
      m << cplx(values[0], values[1]), cplx(values[2], values[3]), cplx(values[4], values[5]),
          cplx(values[6], values[7]);
    } else {
      throw IoError("observable file line " + std::to_string(line_no) +
                    ": expected a Pauli name, 4 reals or 4 complex pairs");
    }
    ops.push_back(m);
  }
  if (ops.empty()) throw IoError("observable file is empty");
  return ops;
}

std::vector<ComplexMatrix> load_observables(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open observable file " + path);
  return read_observables(in);
}

}  // namespace qge
