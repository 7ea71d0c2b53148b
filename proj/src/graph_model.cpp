#include "qwflow/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qwflow/errors.hpp"

namespace qwflow {

void ModelConfig::validate() const {
  if (n_vertices < 3) {
    throw ConfigError("n_vertices must be >= 3 (got " + std::to_string(n_vertices) + ")");
  }
  if (marked < 0 || marked >= n_vertices) {
    throw ConfigError("marked vertex " + std::to_string(marked) + " outside [0, " +
                      std::to_string(n_vertices) + ")");
  }
  if (t_max < 0) throw ConfigError("t_max must be >= 0");
}

ArcIndex ArcIndex::build(const ModelConfig& config) {
  config.validate();

  ArcIndex idx;
  idx.n_ = config.n_vertices;
  idx.marked_ = config.marked;
  idx.tail_length_ = config.tail_mode == TailMode::TruncatedTails ? config.t_max + 1 : 1;

  const int n = idx.n_;
  const int len = idx.tail_length_;
  const std::size_t n_internal = idx.internal_count();
  const std::size_t n_arcs = n_internal + static_cast<std::size_t>(n) * 2 * len;

  idx.arcs_.resize(n_arcs);
  idx.inverse_.resize(n_arcs);

  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const std::size_t id = idx.internal_arc(u, v);
      idx.arcs_[id] = {u, v};
      idx.inverse_[id] = idx.internal_arc(v, u);
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int d = 1; d <= len; ++d) {
      const std::size_t in = idx.tail_arc(j, d, true);
      const std::size_t out = in + 1;
      idx.arcs_[in] = {idx.tail_vertex(j, d), idx.tail_vertex(j, d - 1)};
      idx.arcs_[out] = {idx.tail_vertex(j, d - 1), idx.tail_vertex(j, d)};
      idx.inverse_[in] = out;
      idx.inverse_[out] = in;
    }
  }

  // CSR of incoming arcs per vertex.
  const int n_vertices_total = idx.vertex_count();
  std::vector<std::size_t> counts(n_vertices_total, 0);
  for (const Arc& a : idx.arcs_) ++counts[a.terminus];
  idx.incoming_offsets_.assign(n_vertices_total + 1, 0);
  for (int w = 0; w < n_vertices_total; ++w) {
    idx.incoming_offsets_[w + 1] = idx.incoming_offsets_[w] + counts[w];
  }
  idx.incoming_.resize(n_arcs);
  std::vector<std::size_t> fill(idx.incoming_offsets_.begin(), idx.incoming_offsets_.end() - 1);
  for (std::size_t id = 0; id < n_arcs; ++id) {
    idx.incoming_[fill[idx.arcs_[id].terminus]++] = id;
  }
  return idx;
}

std::size_t ArcIndex::internal_arc(int origin, int terminus) const {
  const int col = terminus < origin ? terminus : terminus - 1;
  return static_cast<std::size_t>(origin) * (n_ - 1) + col;
}

std::size_t ArcIndex::tail_arc(int tail, int d, bool inward) const {
  return internal_count() + static_cast<std::size_t>(tail) * 2 * tail_length_ +
         2 * static_cast<std::size_t>(d - 1) + (inward ? 0 : 1);
}

int ArcIndex::tail_vertex(int tail, int d) const {
  return d == 0 ? tail : n_ + tail * tail_length_ + (d - 1);
}

int ArcIndex::distance(int vertex) const {
  return vertex < n_ ? 0 : (vertex - n_) % tail_length_ + 1;
}

std::optional<std::size_t> ArcIndex::find(int origin, int terminus) const {
  const int total = vertex_count();
  if (origin < 0 || terminus < 0 || origin >= total || terminus >= total) return std::nullopt;
  if (origin < n_ && terminus < n_) {
    if (origin == terminus) return std::nullopt;
    return internal_arc(origin, terminus);
  }
  auto tail_of = [&](int v) { return v < n_ ? v : (v - n_) / tail_length_; };
  if (tail_of(origin) != tail_of(terminus)) return std::nullopt;
  const int d_o = distance(origin);
  const int d_t = distance(terminus);
  if (d_o == d_t + 1) return tail_arc(tail_of(origin), d_o, true);
  if (d_t == d_o + 1) return tail_arc(tail_of(origin), d_t, false);
  return std::nullopt;
}

std::span<const std::size_t> ArcIndex::incoming(int vertex) const {
  const std::size_t lo = incoming_offsets_[vertex];
  const std::size_t hi = incoming_offsets_[vertex + 1];
  return {incoming_.data() + lo, hi - lo};
}

ArcClass ArcIndex::arc_class(std::size_t id) const {
  if (id >= internal_count()) {
    return (id - internal_count()) % 2 == 0 ? ArcClass::TailInward : ArcClass::TailOutward;
  }
  const Arc& a = arcs_[id];
  if (a.terminus == marked_) return ArcClass::IntoMarked;
  if (a.origin == marked_) return ArcClass::OutOfMarked;
  return ArcClass::AvoidsMarked;
}

std::size_t ArcIndex::class_size(ArcClass c) const {
  const std::size_t m = static_cast<std::size_t>(n_ - 1);
  switch (c) {
    case ArcClass::IntoMarked:
    case ArcClass::OutOfMarked:
      return m;
    case ArcClass::AvoidsMarked:
      return m * (n_ - 2);
    case ArcClass::TailInward:
    case ArcClass::TailOutward:
      return static_cast<std::size_t>(n_) * tail_length_;
  }
  return 0;
}

ArcField initial_state(const ArcIndex& index) {
  ArcField field;
  field.amplitudes.assign(index.size(), Amplitude{0.0, 0.0});
  for (int j = 0; j < index.n_vertices(); ++j) {
    for (int d = 1; d <= index.tail_length(); ++d) {
      field.amplitudes[index.tail_arc(j, d, true)] = 1.0;
    }
  }
  return field;
}

namespace {

void check_dimensions(const ArcField& field, const ArcIndex& index) {
  if (field.amplitudes.size() != index.size()) {
    throw ConfigError("field has " + std::to_string(field.amplitudes.size()) +
                      " amplitudes, index has " + std::to_string(index.size()) + " arcs");
  }
}

void scatter_at(int vertex, const ArcField& in, const ArcIndex& index, ArcField& out) {
  const auto arcs = index.incoming(vertex);
  if (arcs.empty()) return;
  Amplitude sum{0.0, 0.0};
  for (std::size_t a : arcs) sum += in.amplitudes[a];
  const double r = static_cast<double>(arcs.size());
  const double sign = vertex == index.marked() ? -1.0 : 1.0;
  const Amplitude mean_part = (2.0 / r) * sum;
  for (std::size_t a : arcs) {
    out.amplitudes[index.inverse(a)] = sign * (mean_part - in.amplitudes[a]);
  }
}

}  // namespace

ArcField scatter(const ArcField& field, const ArcIndex& index) {
  check_dimensions(field, index);
  ArcField next;
  next.amplitudes.assign(index.size(), Amplitude{0.0, 0.0});
  next.time = field.time + 1;
  for (int w = 0; w < index.vertex_count(); ++w) scatter_at(w, field, index, next);
  return next;
}

ArcField step(const ArcField& field, const ModelConfig& config, const ArcIndex& index) {
  check_dimensions(field, index);
  const bool source_sink = config.tail_mode == TailMode::SourceSink;
  if (!source_sink && field.time >= config.t_max) {
    throw HorizonError("step from t=" + std::to_string(field.time) +
                       " exceeds truncated-tail horizon t_max=" + std::to_string(config.t_max));
  }

  ArcField next;
  next.amplitudes.assign(index.size(), Amplitude{0.0, 0.0});
  next.time = field.time + 1;

  const int n = index.n_vertices();
  const int last = source_sink ? n : index.vertex_count();
  for (int w = 0; w < last; ++w) scatter_at(w, field, index, next);

  if (source_sink) {
    for (int j = 0; j < n; ++j) next.amplitudes[index.tail_arc(j, 1, true)] = 1.0;
  }
  return next;
}

std::vector<double> unnormalized_probabilities(const ArcField& field, const ArcIndex& index) {
  check_dimensions(field, index);
  std::vector<double> nu(index.n_vertices(), 0.0);
  for (std::size_t id = 0; id < index.internal_count(); ++id) {
    nu[index.arc(id).terminus] += std::norm(field.amplitudes[id]);
  }
  return nu;
}

RelativeProbability relative_prob(const ArcField& field, const ArcIndex& index, int vertex) {
  if (vertex < 0 || vertex >= index.n_vertices()) {
    throw ConfigError("vertex " + std::to_string(vertex) + " is not an internal vertex");
  }
  const auto nu = unnormalized_probabilities(field, index);
  double total = 0.0;
  for (double x : nu) total += x;
  RelativeProbability out;
  out.unnormalized = nu[vertex];
  if (total > 0.0) out.normalized = nu[vertex] / total;
  return out;
}

double internal_norm(const ArcField& field, const ArcIndex& index) {
  check_dimensions(field, index);
  double s = 0.0;
  for (std::size_t id = 0; id < index.internal_count(); ++id) s += std::norm(field.amplitudes[id]);
  return std::sqrt(s);
}

double l2_norm(const ArcField& field) {
  double s = 0.0;
  for (const auto& z : field.amplitudes) s += std::norm(z);
  return std::sqrt(s);
}

ClassSnapshot class_snapshot(const ArcField& field, const ArcIndex& index) {
  check_dimensions(field, index);
  const int n = index.n_vertices();
  const int m = index.marked();
  const int r = (m + 1) % n;
  const int s = (m + 2) % n;

  const std::array<Amplitude, 3> reps{field.amplitudes[index.internal_arc(r, m)],
                                      field.amplitudes[index.internal_arc(m, r)],
                                      field.amplitudes[index.internal_arc(r, s)]};
  ClassSnapshot snap;
  for (int k = 0; k < 3; ++k) snap.values[k] = reps[k].real();

  for (std::size_t id = 0; id < index.internal_count(); ++id) {
    const int k = static_cast<int>(index.arc_class(id));
    snap.max_deviation = std::max(snap.max_deviation, std::abs(field.amplitudes[id] - reps[k]));
  }
  for (const auto& z : field.amplitudes) snap.max_imag = std::max(snap.max_imag, std::abs(z.imag()));
  return snap;
}

FullRun evolve(const ModelConfig& config,
               std::optional<std::array<double, 3>> stationary_class_values) {
  const ArcIndex index = ArcIndex::build(config);
  const int n = index.n_vertices();
  const int unmarked = (config.marked + 1) % n;

  FullRun run;
  run.series.method = "full";
  run.series.n_vertices = n;
  run.series.records.reserve(static_cast<std::size_t>(config.t_max) + 1);

  ArcField field = initial_state(index);
  for (int t = 0;; ++t) {
    const auto nu = unnormalized_probabilities(field, index);
    double total = 0.0;
    for (double x : nu) total += x;

    const ClassSnapshot snap = class_snapshot(field, index);
    run.max_class_deviation = std::max(run.max_class_deviation, snap.max_deviation);
    run.max_imag = std::max(run.max_imag, snap.max_imag);

    StepRecord rec;
    rec.t = t;
    rec.norm_kn = std::sqrt(total);
    rec.class_values = snap.values;
    if (total > 0.0) {
      rec.nu_marked = nu[config.marked] / total;
      rec.nu_unmarked = nu[unmarked] / total;
    }
    if (stationary_class_values) {
      double d2 = 0.0;
      for (std::size_t id = 0; id < index.internal_count(); ++id) {
        const int k = static_cast<int>(index.arc_class(id));
        d2 += std::norm(field.amplitudes[id] - (*stationary_class_values)[k]);
      }
      rec.dist_stationary = std::sqrt(d2);
    }
    run.series.records.push_back(rec);

    if (t == config.t_max) break;
    field = step(field, config, index);
  }
  return run;
}

}  // namespace qwflow
