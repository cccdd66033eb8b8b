// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skc/errors.hpp"
#include "skc/unitary.hpp"

namespace skc {

/// Operator-norm tolerance for recognizing one gate as another's inverse.
inline constexpr double kInverseTol = 1e-10;

struct Gate {
  std::string name;
  Unitary unitary;
  int inverse_index;  // index of the gate equal to this one's adjoint
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h) {
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/// A named, inverse-closed set of SU(d) generators.  Construction
/// validates unitarity, projects away global phases, and synthesizes any
/// missing inverses (suffix "_dag"), so the closure axiom always holds on
/// the resulting object.  Universality is assumed, not checked.
class InstructionSet {
 public:
  static InstructionSet create(int dim,
                               std::vector<std::pair<std::string, Matrix>> raw,
                               const Tolerances& tol = {},
                               std::vector<std::string>* warnings = nullptr) {
    if (dim < 2) throw UsageError("instruction set: dim must be at least 2");
    if (raw.empty()) throw UsageError("instruction set: empty gate list");
    InstructionSet set;
    set.dim_ = dim;
    for (auto& [name, m] : raw) {
      if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
        throw UsageError("instruction set: gate names must be non-empty and "
                         "contain no whitespace: '" + name + "'");
      }
      if (m.rows() != dim || m.cols() != dim) {
        std::ostringstream os;
        os << "instruction set: gate '" << name << "' is " << m.rows() << "x"
           << m.cols() << ", expected " << dim << "x" << dim;
        throw UsageError(os.str());
      }
      Unitary u = [&] {
        try {
          return Unitary(std::move(m), tol);
        } catch (const PreconditionError& e) {
          throw UsageError("instruction set: gate '" + name + "': " + e.what());
        }
      }();
      if (!u.is_special(tol.determinant)) {
        const double dev = std::abs(u.matrix().determinant() - Complex(1.0));
        u = project_su(u, tol);
        if (warnings != nullptr) {
          std::ostringstream os;
          os << "gate '" << name << "': projected to SU(" << dim
             << ") (|det - 1| was " << dev << ")";
          warnings->push_back(os.str());
        }
        if (!u.is_special(tol.determinant)) {
          throw UsageError("instruction set: gate '" + name +
                           "': determinant still off after projection");
        }
      }
      for (const Gate& g : set.gates_) {
        if (g.name == name) {
          throw UsageError("instruction set: duplicate gate name '" + name + "'");
        }
      }
      set.gates_.push_back(Gate{name, std::move(u), -1});
    }
    set.close_under_inverse();
    if (warnings != nullptr) {
      warnings->push_back(
          "universality of the instruction set is assumed, not checked");
    }
    return set;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return gates_.size(); }
  const Gate& gate(std::size_t i) const { return gates_[i]; }
  const std::vector<Gate>& gates() const { return gates_; }
  int inverse_of(int i) const { return gates_[i].inverse_index; }

  std::optional<int> find(const std::string& name) const {
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      if (gates_[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  /// Stable 64-bit content hash (names plus matrix entries as decimal
  /// text), used to pair persisted nets with the set that built them.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;
    h = detail::fnv1a("skc-gateset-v1", h);
    h = detail::fnv1a(std::to_string(dim_), h);
    for (const Gate& g : gates_) {
      h = detail::fnv1a(g.name, h);
      h = detail::fnv1a("\x1f", h);
      const Matrix& m = g.unitary.matrix();
      for (int r = 0; r < dim_; ++r) {
        for (int c = 0; c < dim_; ++c) {
          h = detail::fnv1a(detail::format_double(m(r, c).real()), h);
          h = detail::fnv1a(",", h);
          h = detail::fnv1a(detail::format_double(m(r, c).imag()), h);
          h = detail::fnv1a(";", h);
        }
      }
    }
    return h;
  }

 private:
  void close_under_inverse() {
    const std::size_t original = gates_.size();
    for (std::size_t i = 0; i < original; ++i) {
      const Unitary adj = gates_[i].unitary.adjoint();
      int match = -1;
      for (std::size_t j = 0; j < original; ++j) {
        if (op_norm_distance(gates_[j].unitary, adj) <= kInverseTol) {
          match = static_cast<int>(j);
          break;
        }
      }
      if (match >= 0) {
        gates_[i].inverse_index = match;
        continue;
      }
      const std::string name = gates_[i].name + "_dag";
      if (find(name).has_value()) {
        throw UsageError("instruction set: gate '" + gates_[i].name +
                         "' needs a synthesized inverse but the name '" + name +
                         "' is already taken");
      }
      gates_.push_back(Gate{name, adj, static_cast<int>(i)});
      gates_[i].inverse_index = static_cast<int>(gates_.size() - 1);
    }
  }

  int dim_ = 0;
  std::vector<Gate> gates_;
};

/// An ordered list of generator references.  The unitary of the sequence
/// g1,...,gm is the matrix product g1·g2·...·gm, i.e. the gates are applied
/// to a state in reverse listed order.
struct GateSequence {
  std::vector<std::int32_t> gates;
  std::optional<Matrix> cached_unitary;

  std::size_t length() const { return gates.size(); }
  bool operator==(const GateSequence& o) const { return gates == o.gates; }
};

/// Product of the sequence's gates in listed order.
inline Unitary evaluate(const GateSequence& seq, const InstructionSet& set) {
  Matrix acc = Matrix::Identity(set.dim(), set.dim());
  for (const std::int32_t g : seq.gates) {
    if (g < 0 || static_cast<std::size_t>(g) >= set.size()) {
      throw UsageError("evaluate: gate index out of range");
    }
    acc = acc * set.gate(g).unitary.matrix();
  }
  const double slack = 1e-12 + 1e-15 * static_cast<double>(seq.gates.size());
  return Unitary(std::move(acc), Tolerances{.unitarity = slack});
}

/// Fills the cache if absent and returns the cached product.
inline const Matrix& evaluate_cached(GateSequence& seq, const InstructionSet& set) {
  if (!seq.cached_unitary.has_value()) {
    seq.cached_unitary = evaluate(seq, set).matrix();
  }
  return *seq.cached_unitary;
}

/// Reverses the sequence and replaces every gate by its inverse, so that
/// evaluate(invert(s)) = evaluate(s)†.
inline GateSequence invert(const GateSequence& seq, const InstructionSet& set) {
  GateSequence out;
  out.gates.reserve(seq.gates.size());
  for (auto it = seq.gates.rbegin(); it != seq.gates.rend(); ++it) {
    out.gates.push_back(set.inverse_of(*it));
  }
  return out;
}

/// Cancels adjacent (g, g†) pairs to a fixed point.  The evaluated unitary
/// is unchanged (to roundoff) and the length never increases.
inline GateSequence simplify(const GateSequence& seq, const InstructionSet& set) {
  GateSequence out;
  out.gates.reserve(seq.gates.size());
  for (const std::int32_t g : seq.gates) {
    if (!out.gates.empty() && set.inverse_of(out.gates.back()) == g) {
      out.gates.pop_back();
    } else {
      out.gates.push_back(g);
    }
  }
  return out;
}

inline GateSequence concat(const GateSequence& a, const GateSequence& b) {
  GateSequence out = a;
  out.cached_unitary.reset();
  out.gates.insert(out.gates.end(), b.gates.begin(), b.gates.end());
  return out;
}

enum class SequenceOrder {
  product,  ///< listed order: the sequence reads as the matrix product
  circuit,  ///< application order: reversed relative to the product
};

/// Whitespace-separated gate names, one sequence per line.
inline std::string format_sequence(const GateSequence& seq,
                                   const InstructionSet& set,
                                   SequenceOrder order = SequenceOrder::product) {
  std::string out;
  const auto append = [&](std::int32_t g) {
    if (!out.empty()) out += ' ';
    out += set.gate(g).name;
  };
  if (order == SequenceOrder::product) {
    for (const std::int32_t g : seq.gates) append(g);
  } else {
    for (auto it = seq.gates.rbegin(); it != seq.gates.rend(); ++it) append(*it);
  }
  return out;
}

inline GateSequence parse_sequence(const std::string& line,
                                   const InstructionSet& set,
                                   SequenceOrder order = SequenceOrder::product) {
  GateSequence seq;
  std::istringstream is(line);
  std::string name;
  while (is >> name) {
    const auto idx = set.find(name);
    if (!idx.has_value()) throw UsageError("unknown gate name '" + name + "'");
    seq.gates.push_back(*idx);
  }
  if (order == SequenceOrder::circuit) {
    std::reverse(seq.gates.begin(), seq.gates.end());
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Matrix literal text format: row-major whitespace-separated "re,im" pairs.
// ---------------------------------------------------------------------------

inline std::string format_complex_pair(const Complex& z) {
  return detail::format_double(z.real()) + "," + detail::format_double(z.imag());
}

inline Complex parse_complex_pair(const std::string& token) {
  const auto comma = token.find(',');
  if (comma == std::string::npos) {
    throw UsageError("matrix literal: expected \"re,im\", got '" + token + "'");
  }
  char* end = nullptr;
  const std::string re_s = token.substr(0, comma);
  const std::string im_s = token.substr(comma + 1);
  const double re = std::strtod(re_s.c_str(), &end);
  if (end == re_s.c_str() || *end != '\0') {
    throw UsageError("matrix literal: bad real part in '" + token + "'");
  }
  const double im = std::strtod(im_s.c_str(), &end);
  if (end == im_s.c_str() || *end != '\0') {
    throw UsageError("matrix literal: bad imaginary part in '" + token + "'");
  }
  return {re, im};
}

inline std::string format_matrix_literal(const Matrix& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_complex_pair(m(r, c));
    }
    out += '\n';
  }
  return out;
}

inline Matrix parse_matrix_literal(const std::string& text) {
  std::istringstream is(text);
  std::vector<Complex> entries;
  std::string token;
  while (is >> token) entries.push_back(parse_complex_pair(token));
  const auto n = entries.size();
  int d = 1;
  while (static_cast<std::size_t>(d) * d < n) ++d;
  if (n == 0 || static_cast<std::size_t>(d) * d != n) {
    throw UsageError("matrix literal: entry count is not a perfect square");
  }
  Matrix m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = entries[r * d + c];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Gate-set JSON: {"dim": d, "gates": [{"name": ..., "matrix": [[re,im],...]}]}
// with row-major matrices.
// ---------------------------------------------------------------------------

inline nlohmann::json gateset_to_json(const InstructionSet& set) {
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : set.gates()) {
    nlohmann::json matrix = nlohmann::json::array();
    const Matrix& m = g.unitary.matrix();
    for (int r = 0; r < set.dim(); ++r) {
      for (int c = 0; c < set.dim(); ++c) {
        matrix.push_back({m(r, c).real(), m(r, c).imag()});
      }
    }
    gates.push_back({{"name", g.name}, {"matrix", std::move(matrix)}});
  }
  return {{"dim", set.dim()}, {"gates", std::move(gates)}};
}

inline InstructionSet parse_instruction_set(const std::string& json_text,
                                            const Tolerances& tol = {},
                                            std::vector<std::string>* warnings =
                                                nullptr) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("gate-set file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("gates")) {
    throw UsageError("gate-set file: expected an object with 'dim' and 'gates'");
  }
  const int dim = doc["dim"].get<int>();
  if (dim < 2 || dim > 64) {
    throw UsageError("gate-set file: dim out of supported range");
  }
  std::vector<std::pair<std::string, Matrix>> raw;
  for (const auto& entry : doc["gates"]) {
    if (!entry.contains("name") || !entry.contains("matrix")) {
      throw UsageError("gate-set file: each gate needs 'name' and 'matrix'");
    }
    const std::string name = entry["name"].get<std::string>();
    const auto& pairs = entry["matrix"];
    if (!pairs.is_array() ||
        pairs.size() != static_cast<std::size_t>(dim) * dim) {
      throw UsageError("gate-set file: gate '" + name + "': matrix must have " +
                       std::to_string(dim * dim) + " [re,im] pairs");
    }
    Matrix m(dim, dim);
    for (int k = 0; k < dim * dim; ++k) {
      const auto& p = pairs[k];
      if (!p.is_array() || p.size() != 2) {
        throw UsageError("gate-set file: gate '" + name +
                         "': entries must be [re, im] pairs");
      }
      m(k / dim, k % dim) = Complex(p[0].get<double>(), p[1].get<double>());
    }
    raw.emplace_back(name, std::move(m));
  }
  return InstructionSet::create(dim, std::move(raw), tol, warnings);
}

}  // namespace skc
