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

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skc/errors.hpp"
#include "skc/gates.hpp"
#include "skc/kdtree.hpp"
#include "skc/rng.hpp"
#include "skc/unitary.hpp"

namespace skc {

/// Exhaustive ε₀-net over short instruction sequences: one canonical
/// representative (shortest, then lexicographically first) per distinct
/// product of length ≤ l0, with a nearest-neighbour index over isometric
/// (SU(2): quaternion) or Frobenius (SU(d), d > 2) embeddings.
///
/// For SU(2) lookups are exact by the quaternion isometry.  For d > 2 a
/// Frobenius shortlist is re-ranked by exact operator-norm distance and
/// widened by the radius guarantee ‖A‖_F ≤ √d·‖A‖_op, so the result equals
/// a deterministic linear scan in both cases.
class BasicNet {
 public:
  static constexpr std::size_t kDefaultMemoryBudget = 2ull << 30;  // 2 GiB
  static constexpr std::size_t kShortlistWidth = 32;

  struct LookupResult {
    std::uint32_t index = 0;
    GateSequence sequence;
    double distance = 0.0;
  };

  struct AuditResult {
    double max_dist = 0.0;
    double mean_dist = 0.0;
  };

  /// Enumerates all products of length ≤ l0 (pruning immediate
  /// backtracking), dedupes at `dedupe_tol` in operator norm, and indexes
  /// the survivors.  Refuses up front if the worst-case entry count would
  /// exceed the memory budget.
  static BasicNet build(const InstructionSet& set, int l0, double dedupe_tol,
                        std::size_t memory_budget_bytes = kDefaultMemoryBudget) {
    if (l0 < 0) throw UsageError("build_net: l0 must be non-negative");
    if (!(dedupe_tol > 0.0)) throw UsageError("build_net: dedupe_tol must be positive");
    BasicNet net;
    net.set_ = set;
    net.l0_ = l0;
    net.dedupe_tol_ = dedupe_tol;
    net.embed_dim_ = embed_dim(set.dim());

    net.enumerate(memory_budget_bytes);
    net.rebuild_index();
    return net;
  }

  /// Worst-case entry count: sum_{l<=l0} |G|(|G|-1)^(l-1) + 1.  Group
  /// relations usually collapse the real count far below this, so the
  /// budget is enforced against actual usage during enumeration, with this
  /// estimate quoted when a build is refused.
  static double enumeration_bound(std::size_t alphabet, int l0) {
    const double m = static_cast<double>(alphabet);
    double bound = 1.0;
    double level = m;
    for (int l = 1; l <= l0 && bound < 1e15; ++l) {
      bound += level;
      level *= (m - 1.0);
    }
    return bound;
  }

  int dim() const { return set_.dim(); }
  int l0() const { return l0_; }
  double dedupe_tol() const { return dedupe_tol_; }
  std::size_t size() const { return seq_offsets_.size() - 1; }
  const InstructionSet& set() const { return set_; }
  std::uint64_t fingerprint() const { return set_.fingerprint(); }
  std::optional<double> measured_eps0() const { return measured_eps0_; }

  GateSequence entry_sequence(std::uint32_t i) const {
    GateSequence seq;
    seq.gates.assign(seq_arena_.begin() + seq_offsets_[i],
                     seq_arena_.begin() + seq_offsets_[i + 1]);
    return seq;
  }

  Unitary entry_unitary(std::uint32_t i) const {
    return Unitary(entry_matrix(i), Tolerances{.unitarity = 1e-9});
  }

  /// Nearest net entry in operator norm; ties broken towards the smaller
  /// entry index, i.e. the shortest-then-lexicographically-first sequence.
  LookupResult lookup(const Unitary& u) const {
    if (u.dim() != dim()) throw UsageError("lookup: dimension mismatch");
    std::vector<double> q(embed_dim_);
    embed_matrix(u.matrix(), q.data());
    LookupResult res;
    if (dim() == 2) {
      const KdTree::Hit hit = index_->nearest(q.data());
      res.index = hit.index;
      res.distance = std::sqrt(hit.dist2);
    } else {
      const auto shortlist = index_->k_nearest(q.data(), kShortlistWidth);
      std::uint32_t best = shortlist.front().index;
      double best_dist = exact_distance(shortlist.front().index, u.matrix());
      for (std::size_t i = 1; i < shortlist.size(); ++i) {
        const double dist = exact_distance(shortlist[i].index, u.matrix());
        if (dist < best_dist || (dist == best_dist && shortlist[i].index < best)) {
          best_dist = dist;
          best = shortlist[i].index;
        }
      }
      // ‖A‖_F ≤ √d ‖A‖_op, so every entry that could beat `best` in
      // operator norm lies within this Frobenius radius.
      const double radius = std::sqrt(static_cast<double>(dim())) * best_dist;
      for (const std::uint32_t idx :
           index_->radius_search(q.data(), radius * (1.0 + 1e-9))) {
        const double dist = exact_distance(idx, u.matrix());
        if (dist < best_dist || (dist == best_dist && idx < best)) {
          best_dist = dist;
          best = idx;
        }
      }
      res.index = best;
      res.distance = best_dist;
    }
    res.sequence = entry_sequence(res.index);
    return res;
  }

  /// Haar-samples targets and reports the worst and mean lookup distance;
  /// the maximum becomes the net's measured ε₀.
  AuditResult audit(int samples, std::uint64_t seed) {
    if (samples <= 0) throw UsageError("audit: samples must be positive");
    Rng rng(seed);
    AuditResult out;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Unitary target = haar_su(rng, dim());
      const double dist = lookup(target).distance;
      out.max_dist = std::max(out.max_dist, dist);
      sum += dist;
    }
    out.mean_dist = sum / samples;
    measured_eps0_ = out.max_dist;
    audit_samples_ = samples;
    audit_seed_ = seed;
    return out;
  }

  /// Overrides the audited ε₀ (used when loading a persisted net).
  void set_measured_eps0(double value, int samples, std::uint64_t seed) {
    measured_eps0_ = value;
    audit_samples_ = samples;
    audit_seed_ = seed;
  }

  int audit_samples() const { return audit_samples_; }
  std::uint64_t audit_seed() const { return audit_seed_; }

  // -------------------------------------------------------------------------
  // Persistence: a versioned text container.  Header fields, a single-line
  // gate-set JSON, then one line per entry with the gate-index list and the
  // matrix entries as decimal text ("re,im" pairs), which round-trip
  // bit-exactly.
  // -------------------------------------------------------------------------

  void save(std::ostream& os) const {
    os << "skc-net 1\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fingerprint());
    os << "fingerprint " << buf << "\n";
    os << "dim " << dim() << "\n";
    os << "l0 " << l0_ << "\n";
    os << "dedupe_tol " << detail::format_double(dedupe_tol_) << "\n";
    if (measured_eps0_.has_value()) {
      os << "audit " << audit_samples_ << " " << audit_seed_ << " "
         << detail::format_double(*measured_eps0_) << "\n";
    }
    os << "gateset " << gateset_to_json(set_).dump() << "\n";
    os << "entries " << size() << "\n";
    const int d = dim();
    for (std::uint32_t i = 0; i < size(); ++i) {
      const auto begin = seq_offsets_[i], end = seq_offsets_[i + 1];
      for (auto k = begin; k < end; ++k) {
        if (k > begin) os << ' ';
        os << seq_arena_[k];
      }
      os << '|';
      const Matrix m = entry_matrix(i);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
          if (r + c > 0) os << ' ';
          os << format_complex_pair(m(r, c));
        }
      }
      os << '\n';
    }
    os << "end\n";
  }

  void save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open '" + path + "' for writing");
    save(os);
    if (!os.good()) throw UsageError("failed writing net to '" + path + "'");
  }

  static BasicNet load(std::istream& is,
                       const InstructionSet* expected_set = nullptr) {
    std::string line;
    if (!std::getline(is, line) || line != "skc-net 1") {
      throw UsageError("net file: bad or unsupported header");
    }
    BasicNet net;
    std::uint64_t stored_fp = 0;
    bool have_fp = false, have_set = false;
    std::size_t entry_count = 0;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "fingerprint") {
        std::string hex;
        ls >> hex;
        stored_fp = std::strtoull(hex.c_str(), nullptr, 16);
        have_fp = true;
      } else if (key == "dim" || key == "l0") {
        int v = 0;
        ls >> v;
        (key == "dim" ? net.declared_dim_ : net.l0_) = v;
      } else if (key == "dedupe_tol") {
        std::string tok;
        ls >> tok;
        net.dedupe_tol_ = std::strtod(tok.c_str(), nullptr);
      } else if (key == "audit") {
        std::string tok;
        ls >> net.audit_samples_ >> net.audit_seed_ >> tok;
        net.measured_eps0_ = std::strtod(tok.c_str(), nullptr);
      } else if (key == "gateset") {
        const auto json_begin = line.find(' ');
        net.set_ = parse_instruction_set(line.substr(json_begin + 1));
        have_set = true;
      } else if (key == "entries") {
        ls >> entry_count;
        break;
      } else {
        throw UsageError("net file: unexpected header line '" + line + "'");
      }
    }
    if (!have_fp || !have_set) {
      throw UsageError("net file: missing fingerprint or gateset");
    }
    if (net.set_.fingerprint() != stored_fp) {
      throw UsageError("net file: fingerprint mismatch with the embedded gate "
                       "set (corrupted or hand-edited file)");
    }
    if (expected_set != nullptr && expected_set->fingerprint() != stored_fp) {
      throw UsageError("net file: fingerprint mismatch: this net was built "
                       "from a different instruction set");
    }
    if (net.declared_dim_ != net.set_.dim()) {
      throw UsageError("net file: declared dim disagrees with the gate set");
    }
    net.embed_dim_ = embed_dim(net.set_.dim());
    const int d = net.set_.dim();
    net.seq_offsets_.push_back(0);
    net.embeds_.reserve(entry_count * net.embed_dim_);
    Matrix m(d, d);
    for (std::size_t i = 0; i < entry_count; ++i) {
      if (!std::getline(is, line)) throw UsageError("net file: truncated entries");
      const auto bar = line.find('|');
      if (bar == std::string::npos) throw UsageError("net file: malformed entry");
      std::istringstream gs(line.substr(0, bar));
      std::int32_t g = 0;
      while (gs >> g) {
        if (g < 0 || static_cast<std::size_t>(g) >= net.set_.size()) {
          throw UsageError("net file: gate index out of range");
        }
        net.seq_arena_.push_back(g);
      }
      net.seq_offsets_.push_back(static_cast<std::uint32_t>(net.seq_arena_.size()));
      std::istringstream ms(line.substr(bar + 1));
      std::string tok;
      for (int k = 0; k < d * d; ++k) {
        if (!(ms >> tok)) throw UsageError("net file: short matrix row");
        m(k / d, k % d) = parse_complex_pair(tok);
      }
      const std::size_t at = net.embeds_.size();
      net.embeds_.resize(at + net.embed_dim_);
      net.embed_matrix(m, net.embeds_.data() + at);
    }
    if (!std::getline(is, line) || line != "end") {
      throw UsageError("net file: missing end marker");
    }
    if (net.size() == 0) throw UsageError("net file: no entries");
    net.rebuild_index();
    return net;
  }

  static BasicNet load_file(const std::string& path,
                            const InstructionSet* expected_set = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError("cannot open net file '" + path + "'");
    return load(is, expected_set);
  }

 private:
  BasicNet() = default;

  static int embed_dim(int dim) { return dim == 2 ? 4 : 2 * dim * dim; }

  void embed_matrix(const Matrix& m, double* out) const {
    const int d = set_.dim();
    if (d == 2) {
      out[0] = 0.5 * (m(0, 0).real() + m(1, 1).real());
      out[1] = 0.5 * (m(0, 1).imag() + m(1, 0).imag());
      out[2] = 0.5 * (m(0, 1).real() - m(1, 0).real());
      out[3] = 0.5 * (m(0, 0).imag() - m(1, 1).imag());
      return;
    }
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        out[2 * (r * d + c)] = m(r, c).real();
        out[2 * (r * d + c) + 1] = m(r, c).imag();
      }
    }
  }

  Matrix entry_matrix(std::uint32_t i) const {
    const int d = set_.dim();
    const double* e = embeds_.data() + std::size_t(i) * embed_dim_;
    Matrix m(d, d);
    if (d == 2) {
      m(0, 0) = Complex(e[0], e[3]);
      m(0, 1) = Complex(e[2], e[1]);
      m(1, 0) = Complex(-e[2], e[1]);
      m(1, 1) = Complex(e[0], -e[3]);
      return m;
    }
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        m(r, c) = Complex(e[2 * (r * d + c)], e[2 * (r * d + c) + 1]);
      }
    }
    return m;
  }

  double exact_distance(std::uint32_t i, const Matrix& m) const {
    return op_norm(entry_matrix(i) - m);
  }

  /// Frobenius (embedding) distance between a stored entry and a candidate
  /// embedding; for d = 2 this equals the operator-norm distance.
  double embed_distance2(std::uint32_t i, const double* q) const {
    const double* e = embeds_.data() + std::size_t(i) * embed_dim_;
    double acc = 0.0;
    for (int k = 0; k < embed_dim_; ++k) {
      const double diff = e[k] - q[k];
      acc += diff * diff;
    }
    return acc;
  }

  // BFS over sequence length; within a length, parents are extended in
  // stored order and gates in index order, so the first product seen with a
  // given value is the shortest-then-lexicographically-first one.  A sorted
  // window on the first embedding coordinate (|Δcoord| ≤ ‖ΔU‖_op) makes the
  // duplicate test exact.
  std::size_t approx_bytes() const {
    return embeds_.size() * sizeof(double) + seq_arena_.size() * 4 +
           seq_offsets_.size() * 4 + size() * 48;  // window-map overhead
  }

  void check_budget(std::size_t budget) const {
    if (approx_bytes() <= budget) return;
    std::ostringstream os;
    os << "build_net: net storage exceeded the memory budget of "
       << budget / (1 << 20) << " MiB after " << size()
       << " entries (worst-case enumeration bound sum_{l<=l0} "
          "|G|(|G|-1)^(l-1) + 1 = "
       << enumeration_bound(set_.size(), l0_)
       << "); the required l0 grows like (d^2-1) * log(1/eps0) / log|G|, "
          "so covering higher dimensions finely needs a budget to match";
    throw PreconditionError(os.str());
  }

  void enumerate(std::size_t budget) {
    const int d = set_.dim();
    const std::size_t m = set_.size();
    std::map<double, std::vector<std::uint32_t>> window;

    const auto is_duplicate = [&](const Matrix& cand, const double* q) {
      const double key = q[0];
      const double tol = dedupe_tol_;
      auto it = window.lower_bound(key - tol);
      for (; it != window.end() && it->first <= key + tol; ++it) {
        for (const std::uint32_t j : it->second) {
          const double frob = std::sqrt(embed_distance2(j, q));
          if (d == 2) {
            if (frob <= tol) return true;
            continue;
          }
          if (frob <= tol) return true;
          if (frob > tol * std::sqrt(static_cast<double>(d))) continue;
          if (exact_distance(j, cand) <= tol) return true;
        }
      }
      return false;
    };

    const auto push_entry = [&](const Matrix& mat, const std::uint32_t* parent_seq,
                                std::uint32_t parent_len, std::int32_t gate) {
      const std::size_t at = embeds_.size();
      embeds_.resize(at + embed_dim_);
      embed_matrix(mat, embeds_.data() + at);
      for (std::uint32_t k = 0; k < parent_len; ++k) {
        seq_arena_.push_back(static_cast<std::int32_t>(parent_seq[k]));
      }
      if (gate >= 0) seq_arena_.push_back(gate);
      seq_offsets_.push_back(static_cast<std::uint32_t>(seq_arena_.size()));
      const auto idx = static_cast<std::uint32_t>(seq_offsets_.size() - 2);
      window[embeds_[at]].push_back(idx);
      return idx;
    };

    seq_offsets_.push_back(0);
    std::vector<std::uint32_t> prev_level;
    prev_level.push_back(push_entry(Matrix::Identity(d, d), nullptr, 0, -1));

    std::vector<std::uint32_t> cur_level;
    std::vector<std::uint32_t> parent_seq;
    std::vector<double> q(embed_dim_);
    Matrix cand(d, d);
    for (int l = 1; l <= l0_; ++l) {
      cur_level.clear();
      for (const std::uint32_t parent : prev_level) {
        const Matrix parent_mat = entry_matrix(parent);
        const auto begin = seq_offsets_[parent], end = seq_offsets_[parent + 1];
        parent_seq.assign(seq_arena_.begin() + begin, seq_arena_.begin() + end);
        const std::int32_t last =
            parent_seq.empty() ? -1
                               : static_cast<std::int32_t>(parent_seq.back());
        for (std::size_t g = 0; g < m; ++g) {
          if (last >= 0 && set_.inverse_of(last) == static_cast<int>(g)) {
            continue;  // no immediate backtracking
          }
          cand.noalias() = parent_mat * set_.gate(g).unitary.matrix();
          embed_matrix(cand, q.data());
          if (is_duplicate(cand, q.data())) continue;
          cur_level.push_back(push_entry(cand, parent_seq.data(),
                                         static_cast<std::uint32_t>(parent_seq.size()),
                                         static_cast<std::int32_t>(g)));
          if ((cur_level.size() & 0xffff) == 0) check_budget(budget);
        }
      }
      check_budget(budget);
      prev_level.swap(cur_level);
      if (prev_level.empty()) break;
    }
  }

  void rebuild_index() {
    index_ = std::make_unique<KdTree>(embeds_.data(), size(), embed_dim_);
  }

  InstructionSet set_;
  int declared_dim_ = 0;
  int l0_ = 0;
  double dedupe_tol_ = 0.0;
  int embed_dim_ = 0;
  std::vector<double> embeds_;
  std::vector<std::uint32_t> seq_offsets_;
  std::vector<std::int32_t> seq_arena_;
  std::optional<double> measured_eps0_;
  int audit_samples_ = 0;
  std::uint64_t audit_seed_ = 0;
  std::unique_ptr<KdTree> index_;
};

}  // namespace skc
