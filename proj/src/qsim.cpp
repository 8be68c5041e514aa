#include "owp/qsim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "owp/bitio.hpp"

namespace owp {

namespace {
constexpr int kMaxQubits = 12;
constexpr double kClampThreshold = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::S: return "S";
    case GateKind::T: return "T";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
  }
  throw std::invalid_argument("gate_name: unknown gate");
}

GateKind gate_from_name(const std::string& name) {
  if (name == "H") return GateKind::H;
  if (name == "X") return GateKind::X;
  if (name == "Z") return GateKind::Z;
  if (name == "S") return GateKind::S;
  if (name == "T") return GateKind::T;
  if (name == "CNOT") return GateKind::CNOT;
  if (name == "CZ") return GateKind::CZ;
  throw std::invalid_argument("unknown gate kind: " + name);
}

bool gate_is_two_qubit(GateKind kind) { return kind == GateKind::CNOT || kind == GateKind::CZ; }

void validate_circuit(const Circuit& c) {
  if (c.n_qubits < 1 || c.n_qubits > kMaxQubits)
    throw std::invalid_argument("circuit: n_qubits out of range [1,12]");
  for (const Gate& g : c.gates) {
    if (g.target < 0 || g.target >= c.n_qubits)
      throw std::invalid_argument("circuit: gate target out of range");
    if (gate_is_two_qubit(g.kind)) {
      if (g.target2 < 0 || g.target2 >= c.n_qubits)
        throw std::invalid_argument("circuit: gate target out of range");
      if (g.target2 == g.target)
        throw std::invalid_argument("circuit: two-qubit gate needs distinct targets");
    } else if (g.target2 != -1) {
      throw std::invalid_argument("circuit: single-qubit gate takes one target");
    }
  }
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const Amplitude& a : amps) s += std::norm(a);
  return s;
}

namespace {

// Qubit q occupies bit (n_qubits-1-q) of the state index, so that index
// bits read MSB-first spell the output string qubit 0 first.
inline std::size_t qubit_stride(int n_qubits, int q) {
  return std::size_t{1} << (n_qubits - 1 - q);
}

void apply_single(StateVector& sv, int q, GateKind kind) {
  const std::size_t stride = qubit_stride(sv.n_qubits, q);
  const std::size_t dim = sv.amps.size();
  switch (kind) {
    case GateKind::H:
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & stride) continue;
        const Amplitude a0 = sv.amps[i];
        const Amplitude a1 = sv.amps[i | stride];
        sv.amps[i] = kInvSqrt2 * (a0 + a1);
        sv.amps[i | stride] = kInvSqrt2 * (a0 - a1);
      }
      break;
    case GateKind::X:
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & stride) continue;
        std::swap(sv.amps[i], sv.amps[i | stride]);
      }
      break;
    case GateKind::Z:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & stride) sv.amps[i] = -sv.amps[i];
      break;
    case GateKind::S:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & stride) sv.amps[i] *= Amplitude(0.0, 1.0);
      break;
    case GateKind::T:
      for (std::size_t i = 0; i < dim; ++i)
        if (i & stride) sv.amps[i] *= Amplitude(kInvSqrt2, kInvSqrt2);
      break;
    default:
      throw std::logic_error("apply_single: not a single-qubit gate");
  }
}

void apply_two(StateVector& sv, int control, int target, GateKind kind) {
  const std::size_t cs = qubit_stride(sv.n_qubits, control);
  const std::size_t ts = qubit_stride(sv.n_qubits, target);
  const std::size_t dim = sv.amps.size();
  if (kind == GateKind::CNOT) {
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & cs) && !(i & ts)) std::swap(sv.amps[i], sv.amps[i | ts]);
    }
  } else {  // CZ
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & cs) && (i & ts)) sv.amps[i] = -sv.amps[i];
    }
  }
}

}  // namespace

StateVector run(const Circuit& c) {
  validate_circuit(c);
  StateVector sv;
  sv.n_qubits = c.n_qubits;
  sv.amps.assign(std::size_t{1} << c.n_qubits, Amplitude(0.0, 0.0));
  sv.amps[0] = Amplitude(1.0, 0.0);
  for (const Gate& g : c.gates) {
    if (gate_is_two_qubit(g.kind)) {
      apply_two(sv, g.target, g.target2, g.kind);
    } else {
      apply_single(sv, g.target, g.kind);
    }
  }
  return sv;
}

FiniteDistribution output_distribution(const Circuit& c) {
  const StateVector sv = run(c);
  std::vector<std::pair<BitString, double>> entries;
  double kept = 0.0;
  for (std::size_t i = 0; i < sv.amps.size(); ++i) {
    const double p = std::norm(sv.amps[i]);
    if (p >= kClampThreshold) {
      entries.emplace_back(BitString(static_cast<std::uint32_t>(i), c.n_qubits), p);
      kept += p;
    }
  }
  for (auto& [x, p] : entries) p /= kept;
  return FiniteDistribution::from_float(c.n_qubits, std::move(entries));
}

std::string circuit_to_json(const Circuit& c) {
  nlohmann::json j;
  j["n_qubits"] = c.n_qubits;
  j["gates"] = nlohmann::json::array();
  for (const Gate& g : c.gates) {
    nlohmann::json jg;
    jg["kind"] = gate_name(g.kind);
    if (gate_is_two_qubit(g.kind)) {
      jg["targets"] = {g.target, g.target2};
    } else {
      jg["targets"] = {g.target};
    }
    j["gates"].push_back(jg);
  }
  return j.dump();
}

Circuit circuit_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Circuit c;
  c.n_qubits = j.at("n_qubits").get<int>();
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_from_name(jg.at("kind").get<std::string>());
    const auto& targets = jg.at("targets");
    if (gate_is_two_qubit(g.kind)) {
      if (targets.size() != 2) throw std::invalid_argument("circuit json: two-qubit gate needs 2 targets");
      g.target = targets[0].get<int>();
      g.target2 = targets[1].get<int>();
    } else {
      if (targets.size() != 1) throw std::invalid_argument("circuit json: single-qubit gate needs 1 target");
      g.target = targets[0].get<int>();
    }
    c.gates.push_back(g);
  }
  validate_circuit(c);
  return c;
}

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return circuit_from_json(ss.str());
}

namespace {
int target_width(int n_qubits) {
  int w = 0;
  while ((1 << w) < n_qubits) ++w;
  return w;
}
}  // namespace

std::vector<int> encode_circuit_bits(const Circuit& c) {
  validate_circuit(c);
  BitWriter w;
  w.push_gamma(static_cast<std::uint64_t>(c.n_qubits));
  w.push_gamma(static_cast<std::uint64_t>(c.gates.size()) + 1);
  const int tw = target_width(c.n_qubits);
  for (const Gate& g : c.gates) {
    w.push_bits(static_cast<std::uint64_t>(g.kind), 3);
    w.push_bits(static_cast<std::uint64_t>(g.target), tw);
    if (gate_is_two_qubit(g.kind)) w.push_bits(static_cast<std::uint64_t>(g.target2), tw);
  }
  return w.bits();
}

Circuit decode_circuit_bits(BitReader& reader) {
  Circuit c;
  std::uint64_t nq = reader.read_gamma();
  if (nq < 1 || nq > kMaxQubits) throw std::invalid_argument("circuit bits: bad qubit count");
  c.n_qubits = static_cast<int>(nq);
  std::uint64_t gates_plus_one = reader.read_gamma();
  if (gates_plus_one < 1 || gates_plus_one > 4096) throw std::invalid_argument("circuit bits: bad gate count");
  const int tw = target_width(c.n_qubits);
  for (std::uint64_t i = 0; i + 1 < gates_plus_one; ++i) {
    Gate g;
    std::uint64_t kind = reader.read_bits(3);
    if (kind > 6) throw std::invalid_argument("circuit bits: bad gate kind");
    g.kind = static_cast<GateKind>(kind);
    g.target = static_cast<int>(reader.read_bits(tw));
    if (gate_is_two_qubit(g.kind)) g.target2 = static_cast<int>(reader.read_bits(tw));
    c.gates.push_back(g);
  }
  validate_circuit(c);
  return c;
}

}  // namespace owp
