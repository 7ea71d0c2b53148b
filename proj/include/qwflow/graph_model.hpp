#pragma once

// Arc-space simulation of the Grover walk on the complete graph K_N with a
// tail attached to every vertex (the "hedgehog" graph), constant inflow from
// the tails and one marked vertex whose scattering carries an extra sign.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qwflow/time_series.hpp"

namespace qwflow {

using Amplitude = std::complex<double>;

enum class TailMode {
  // Finite tails of length t_max + 1; exact for t <= t_max by finite
  // propagation speed.
  TruncatedTails,
  // Only the first tail edge is kept: inflow slot reset to 1 each step,
  // outflow never returns. State size independent of t_max.
  SourceSink,
};

struct ModelConfig {
  int n_vertices = 3;
  int marked = 0;
  int t_max = 0;
  TailMode tail_mode = TailMode::SourceSink;

  void validate() const;  // throws ConfigError
};

enum class ArcClass {
  IntoMarked,     // A_+ : internal, t(a) = u_*
  OutOfMarked,    // A_- : internal, o(a) = u_*
  AvoidsMarked,   // A_0 : internal, neither endpoint is u_*
  TailInward,
  TailOutward,
};

struct Arc {
  int origin = 0;
  int terminus = 0;
};

// Dense enumeration of the arcs of K_N plus truncated tails.
//
// Vertex ids: internal vertices 0..N-1; the tail vertex at distance d >= 1
// from internal vertex j has id N + j*L + (d-1). Arc ids: internal arcs
// first (u -> v at u*(N-1) + (v < u ? v : v-1)), then per tail j and edge
// d = 1..L the inward arc (d -> d-1) followed by the outward arc.
class ArcIndex {
 public:
  static ArcIndex build(const ModelConfig& config);

  int n_vertices() const { return n_; }
  int marked() const { return marked_; }
  int tail_length() const { return tail_length_; }
  int vertex_count() const { return n_ + n_ * tail_length_; }
  std::size_t size() const { return arcs_.size(); }
  std::size_t internal_count() const { return static_cast<std::size_t>(n_) * (n_ - 1); }

  const Arc& arc(std::size_t id) const { return arcs_[id]; }
  std::size_t inverse(std::size_t id) const { return inverse_[id]; }
  ArcClass arc_class(std::size_t id) const;
  bool is_internal_arc(std::size_t id) const { return id < internal_count(); }

  std::size_t internal_arc(int origin, int terminus) const;
  // Tail edge d in [1, L] of tail j, inward (d -> d-1) or outward.
  std::size_t tail_arc(int tail, int d, bool inward) const;
  // (origin, terminus) -> arc id, if such an arc exists.
  std::optional<std::size_t> find(int origin, int terminus) const;

  // Arcs terminating at a vertex, in a fixed order.
  std::span<const std::size_t> incoming(int vertex) const;
  int degree(int vertex) const { return static_cast<int>(incoming(vertex).size()); }

  int tail_vertex(int tail, int d) const;  // d = 0 is the internal vertex itself
  // Distance of a vertex from K_N (0 for internal vertices).
  int distance(int vertex) const;

  std::size_t class_size(ArcClass c) const;

 private:
  int n_ = 0;
  int marked_ = 0;
  int tail_length_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> inverse_;
  std::vector<std::size_t> incoming_offsets_;
  std::vector<std::size_t> incoming_;
};

struct ArcField {
  std::vector<Amplitude> amplitudes;
  int time = 0;
};

ArcField initial_state(const ArcIndex& index);

// One application of the evolution operator. Each vertex with incoming arcs
// a_1..a_r writes (+/-)Gr(r) (Psi(a_1), ..., Psi(a_r)) onto the reversed arcs,
// with the minus sign at the marked vertex.
ArcField step(const ArcField& field, const ModelConfig& config, const ArcIndex& index);

// Pure local scattering, no inflow/outflow handling and no horizon check.
// Used for unitarity checks on compactly supported fields.
ArcField scatter(const ArcField& field, const ArcIndex& index);

struct RelativeProbability {
  double unnormalized = 0.0;          // nu~_t(u)
  std::optional<double> normalized;   // nu_t(u), empty when the internal field vanishes
};

RelativeProbability relative_prob(const ArcField& field, const ArcIndex& index, int vertex);

// nu~_t(u) for every internal vertex.
std::vector<double> unnormalized_probabilities(const ArcField& field, const ArcIndex& index);

// ||f||_{K_N}: l2 norm over internal arcs.
double internal_norm(const ArcField& field, const ArcIndex& index);
double l2_norm(const ArcField& field);

struct ClassSnapshot {
  std::array<double, 3> values{};   // representatives of A_+, A_-, A_0
  double max_deviation = 0.0;       // max |Psi(a) - representative| over internal arcs
  double max_imag = 0.0;            // max |Im Psi(a)| over all arcs
};

ClassSnapshot class_snapshot(const ArcField& field, const ArcIndex& index);

// Full arc-space run over t = 0..t_max. When stationary class values are
// supplied, dist_stationary holds ||Psi_inf - Psi_t||_{K_N} computed arc by arc.
struct FullRun {
  TimeSeries series;
  double max_class_deviation = 0.0;
  double max_imag = 0.0;
};

FullRun evolve(const ModelConfig& config,
               std::optional<std::array<double, 3>> stationary_class_values = std::nullopt);

}  // namespace qwflow
