#pragma once

// Gate-level compilations of the static preparation unitary, for resource
// counting and cross-checks against the direct purification. Two variants:
//
//   intuitive: Givens cascade on the ancillas, one CNOT per ancilla copying
//     it into the tail of the system register, then a basis relabeling
//     (permutation) moving label j-1 onto subspace element c_j.
//   scalable: Givens cascade, then for each subspace element one
//     multi-controlled block (ancilla pattern j-1 controls X's on the set
//     bits of c_j).
//
// The permutation is treated as a relabeling whose elementary-gate cost is
// deliberately left out of the totals (flagged in Counts).

#include <cstdint>
#include <string>
#include <vector>

#include "tepid/ansatz.hpp"
#include "tepid/state.hpp"

namespace tepid {

struct Gate {
  enum class Kind { givens, cnot, mc_prep, permutation };
  Kind kind = Kind::givens;

  // givens: plane index k (1-based) on the ancilla register, and the angle.
  int level = 0;
  double angle = 0.0;

  // cnot: ancilla control qubit -> system target qubit (0-based within each
  // register).
  int control = 0;
  int target = 0;

  // mc_prep: fires when the ancilla register equals `pattern`; flips the
  // system bits set in `targets`.
  std::uint64_t pattern = 0;
  std::uint64_t targets = 0;

  // permutation: system basis relabeling, new_index = perm[old_index].
  std::vector<std::uint32_t> perm;
};

struct GateCircuit {
  int n_system = 0;
  int n_ancilla = 0;
  std::string variant;  // "intuitive" or "scalable"
  std::vector<Gate> gates;

  struct Counts {
    int givens = 0;
    int cnot = 0;
    int mc_prep = 0;
    int permutation = 0;
    // CNOT-equivalent total under the documented cost model; permutations
    // are excluded and flagged instead.
    long elementary = 0;
    bool permutation_unaccounted = false;
  };
  Counts counts() const;

  // Line-oriented text form (see docs/formats.md).
  std::string serialize() const;
};

enum class UmVariant { intuitive, scalable };

GateCircuit build_um_circuit(const std::vector<double>& phi,
                             const ComputationalSubspace& subspace, UmVariant variant);

// Apply one gate / run the whole circuit on the purified register
// (|0...0> start). Must reproduce prepare_purification exactly.
void apply_gate(StateVector& state, const Gate& gate, int n_system, int n_ancilla);
StateVector simulate(const GateCircuit& circuit);

}  // namespace tepid
