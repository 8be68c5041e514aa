#pragma once

#include <complex>
#include <string>
#include <vector>

#include "owp/bitstring.hpp"
#include "owp/distribution.hpp"

namespace owp {

enum class GateKind : int { H = 0, X = 1, Z = 2, S = 3, T = 4, CNOT = 5, CZ = 6 };

const char* gate_name(GateKind kind);
GateKind gate_from_name(const std::string& name);
bool gate_is_two_qubit(GateKind kind);

struct Gate {
  GateKind kind;
  int target = 0;   // single-qubit target, or control for CNOT/CZ
  int target2 = -1; // second qubit for CNOT/CZ
};

// A measured circuit on n_qubits <= 12 qubits over the fixed gate set.
// Qubit 0 is the leftmost character of the measured output string.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
};

void validate_circuit(const Circuit& c);

using Amplitude = std::complex<double>;

struct StateVector {
  int n_qubits = 0;
  std::vector<Amplitude> amps;

  double norm_sq() const;
};

// Applies the gates in order to |0...0>.
StateVector run(const Circuit& c);

// Exact measurement distribution: p_x = |<x|run(c)>|^2, with amplitudes-
// squared below 1e-12 clamped to zero and the rest renormalized.
FiniteDistribution output_distribution(const Circuit& c);

// Circuit JSON: {"n_qubits": int, "gates": [{"kind": "H", "targets": [0]}]}.
std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);
Circuit load_circuit(const std::string& path);

// Canonical compressed description used for description-length accounting:
// gamma(n_qubits), gamma(#gates + 1), then per gate a 3-bit kind and each
// target in ceil(log2 n_qubits) bits. This is a bijective packing of the
// canonical JSON content; |D| is its bit length.
std::vector<int> encode_circuit_bits(const Circuit& c);
// Throws std::invalid_argument on malformed input.
Circuit decode_circuit_bits(class BitReader& reader);

}  // namespace owp
