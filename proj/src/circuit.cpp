#include "tepid/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tepid/format.hpp"

namespace tepid {

namespace {

std::string bit_label(std::uint64_t value, int width) {
  std::string b(static_cast<std::size_t>(std::max(width, 1)), '0');
  for (int q = 0; q < width; ++q) {
    if ((value >> (width - 1 - q)) & 1u) b[static_cast<std::size_t>(q)] = '1';
  }
  return b;
}

std::vector<std::uint32_t> relabeling_for(const ComputationalSubspace& subspace) {
  const std::size_t dim = std::size_t(1) << subspace.n_system;
  constexpr std::uint32_t kUnset = 0xffffffffu;
  std::vector<std::uint32_t> perm(dim, kUnset);
  std::vector<bool> used(dim, false);
  for (std::size_t j = 0; j < subspace.elements.size(); ++j) {
    perm[j] = static_cast<std::uint32_t>(subspace.elements[j]);
    used[subspace.elements[j]] = true;
  }
  // Close the bijection: remaining sources map to remaining targets in
  // increasing order (any consistent completion works; this one is
  // deterministic).
  std::size_t next = 0;
  for (std::size_t s = subspace.elements.size(); s < dim; ++s) {
    while (used[next]) ++next;
    perm[s] = static_cast<std::uint32_t>(next);
    used[next] = true;
  }
  return perm;
}

}  // namespace

GateCircuit build_um_circuit(const std::vector<double>& phi,
                             const ComputationalSubspace& subspace, UmVariant variant) {
  const int m = subspace.m();
  if (static_cast<int>(phi.size()) + 1 != m) {
    throw std::invalid_argument("angle count does not match the subspace size");
  }
  GateCircuit circuit;
  circuit.n_system = subspace.n_system;
  circuit.n_ancilla = ancilla_count(m);
  circuit.variant = (variant == UmVariant::intuitive) ? "intuitive" : "scalable";

  for (int k = 1; k < m; ++k) {
    Gate g;
    g.kind = Gate::Kind::givens;
    g.level = k;
    g.angle = phi[static_cast<std::size_t>(k - 1)];
    circuit.gates.push_back(std::move(g));
  }

  if (variant == UmVariant::intuitive) {
    // Copy each ancilla qubit into the tail of the system register, then
    // relabel the system basis so label j-1 becomes subspace element c_j.
    for (int j = 1; j <= circuit.n_ancilla; ++j) {
      Gate g;
      g.kind = Gate::Kind::cnot;
      g.control = j - 1;
      g.target = circuit.n_system - circuit.n_ancilla + j - 1;
      circuit.gates.push_back(std::move(g));
    }
    Gate g;
    g.kind = Gate::Kind::permutation;
    g.perm = relabeling_for(subspace);
    circuit.gates.push_back(std::move(g));
  } else {
    for (int j = 1; j <= m; ++j) {
      const std::uint64_t targets = subspace.elements[static_cast<std::size_t>(j - 1)];
      if (targets == 0) continue;  // nothing to flip for the all-zero label
      Gate g;
      g.kind = Gate::Kind::mc_prep;
      g.pattern = static_cast<std::uint64_t>(j - 1);
      g.targets = targets;
      circuit.gates.push_back(std::move(g));
    }
  }
  return circuit;
}

void apply_gate(StateVector& state, const Gate& gate, int n_system, int n_ancilla) {
  if (state.n_qubits() != n_system + n_ancilla) {
    throw std::invalid_argument("state width does not match the circuit registers");
  }
  auto& amps = state.amplitudes();
  const std::size_t dim = amps.size();
  const std::size_t da = std::size_t(1) << n_ancilla;

  switch (gate.kind) {
    case Gate::Kind::givens: {
      const std::size_t k = static_cast<std::size_t>(gate.level);
      if (k < 1 || k >= da) throw std::invalid_argument("rotation plane out of range");
      const double c = std::cos(gate.angle);
      const double s = std::sin(gate.angle);
      for (std::size_t sys = 0; sys < dim / da; ++sys) {
        const std::size_t lo = sys * da + (k - 1);
        const std::complex<double> a = amps[lo];
        const std::complex<double> b = amps[lo + 1];
        amps[lo] = c * a - s * b;
        amps[lo + 1] = s * a + c * b;
      }
      break;
    }
    case Gate::Kind::cnot: {
      if (gate.control < 0 || gate.control >= n_ancilla || gate.target < 0 ||
          gate.target >= n_system) {
        throw std::invalid_argument("CNOT qubits out of range");
      }
      const std::size_t cbit = std::size_t(1) << (n_ancilla - 1 - gate.control);
      const std::size_t tbit = std::size_t(1)
                               << (n_ancilla + n_system - 1 - gate.target);
      for (std::size_t x = 0; x < dim; ++x) {
        if ((x & cbit) && !(x & tbit)) std::swap(amps[x], amps[x | tbit]);
      }
      break;
    }
    case Gate::Kind::mc_prep: {
      if (gate.targets >= (std::uint64_t(1) << n_system) || gate.pattern >= da) {
        throw std::invalid_argument("multi-controlled block out of range");
      }
      const std::size_t flip = static_cast<std::size_t>(gate.targets) << n_ancilla;
      if (flip == 0) break;
      for (std::size_t x = 0; x < dim; ++x) {
        if ((x & (da - 1)) != gate.pattern) continue;
        const std::size_t partner = x ^ flip;
        if (x < partner) std::swap(amps[x], amps[partner]);
      }
      break;
    }
    case Gate::Kind::permutation: {
      if (gate.perm.size() != dim / da) {
        throw std::invalid_argument("permutation size does not match the system register");
      }
      std::vector<std::complex<double>> out(dim, {0.0, 0.0});
      for (std::size_t sys = 0; sys < dim / da; ++sys) {
        const std::size_t target = gate.perm[sys];
        for (std::size_t a = 0; a < da; ++a) out[target * da + a] = amps[sys * da + a];
      }
      amps = std::move(out);
      break;
    }
  }
}

StateVector simulate(const GateCircuit& circuit) {
  StateVector state(circuit.n_system + circuit.n_ancilla);
  for (const Gate& gate : circuit.gates) {
    apply_gate(state, gate, circuit.n_system, circuit.n_ancilla);
  }
  return state;
}

GateCircuit::Counts GateCircuit::counts() const {
  Counts c;
  for (const Gate& gate : gates) {
    switch (gate.kind) {
      case Gate::Kind::givens:
        ++c.givens;
        // A plane rotation on the ancilla register compiles to a ladder of
        // CNOTs and one controlled rotation: linear in the register width.
        c.elementary += 2 * n_ancilla + 1;
        break;
      case Gate::Kind::cnot:
        ++c.cnot;
        c.elementary += 1;
        break;
      case Gate::Kind::mc_prep: {
        ++c.mc_prep;
        // One C^{n_ancilla}X per set target bit, each linear in the control
        // count; with no controls it is a bare X.
        const long per_target = std::max(1, 2 * n_ancilla);
        c.elementary += per_target * std::popcount(gate.targets);
        break;
      }
      case Gate::Kind::permutation:
        ++c.permutation;
        c.permutation_unaccounted = true;
        break;
    }
  }
  return c;
}

std::string GateCircuit::serialize() const {
  std::ostringstream out;
  out << "circuit variant " << variant << " n_system " << n_system << " n_ancilla "
      << n_ancilla << "\n";
  for (const Gate& gate : gates) {
    switch (gate.kind) {
      case Gate::Kind::givens:
        out << "givens " << gate.level << " " << format_double(gate.angle) << "\n";
        break;
      case Gate::Kind::cnot:
        out << "cnot a" << gate.control << " s" << gate.target << "\n";
        break;
      case Gate::Kind::mc_prep:
        out << "mcprep pattern " << bit_label(gate.pattern, n_ancilla) << " targets "
            << bit_label(gate.targets, n_system) << "\n";
        break;
      case Gate::Kind::permutation: {
        out << "perm";
        for (std::uint32_t p : gate.perm) out << " " << p;
        out << "\n";
        break;
      }
    }
  }
  out << "end\n";
  return out.str();
}

}  // namespace tepid
