#pragma once

// Interface coupling maps and the Schur-complement operator of the coupled
// (host) subdomain.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fftddm/error.hpp"
#include "fftddm/geometry.hpp"
#include "fftddm/rectsolver.hpp"

namespace fftddm {

/// R_{to,from}: takes a field on `from_id` to a field on `to_id`.
struct CouplingMap {
  int interface_id = 0;
  int from_id = 0;
  int to_id = 0;
  std::size_t from_size = 0;
  std::size_t to_size = 0;
  double coupling = 0.0;
  /// (index on from_id, index on to_id)
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

inline CouplingMap coupling_map(const CompositeDomain& c, const Interface& itf, int from_id) {
  const bool from_a = itf.side_a.subdomain_id == from_id;
  if (!from_a && itf.side_b.subdomain_id != from_id) {
    throw InvalidArgument("interface " + std::to_string(itf.id) + " does not touch subdomain " +
                          std::to_string(from_id));
  }
  CouplingMap map;
  map.interface_id = itf.id;
  map.from_id = from_id;
  map.to_id = from_a ? itf.side_b.subdomain_id : itf.side_a.subdomain_id;
  map.from_size = c.subdomain(map.from_id).size();
  map.to_size = c.subdomain(map.to_id).size();
  map.coupling = itf.coupling;
  map.pairs.reserve(itf.index_map.size());
  for (const auto& [ia, ib] : itf.index_map) {
    map.pairs.emplace_back(from_a ? ia : ib, from_a ? ib : ia);
  }
  return map;
}

/// out += R v
inline void accumulate_R(const CouplingMap& map, std::span<const double> v, std::span<double> out) {
  if (v.size() != map.from_size || out.size() != map.to_size) throw InvalidArgument("apply_R: length mismatch");
  for (const auto& [from, to] : map.pairs) out[to] += map.coupling * v[from];
}

inline GridField apply_R(const CouplingMap& map, const GridField& v) {
  if (v.subdomain_id != map.from_id) {
    throw InvalidArgument("apply_R: field on subdomain " + std::to_string(v.subdomain_id) + ", map expects " +
                          std::to_string(map.from_id));
  }
  GridField out{map.to_id, std::vector<double>(map.to_size, 0.0)};
  accumulate_R(map, v.values, out.values);
  return out;
}

class SchurOperator {
 public:
  struct Neighbor {
    std::shared_ptr<const RectPlan> plan;
    CouplingMap to_neighbor;  // R_{i,c}
    CouplingMap to_host;      // R_{c,i}
  };

  /// Builds plans for the host and for every subdomain sharing an interface
  /// with it. Coupling values are taken from the interface records as they
  /// are, so a test rig may zero them.
  SchurOperator(const CompositeDomain& c, int host_id) : host_id_(host_id) {
    center_ = std::make_shared<const RectPlan>(c.subdomain(host_id));
    for (const auto& itf : c.interfaces()) {
      if (itf.side_a.subdomain_id != host_id && itf.side_b.subdomain_id != host_id) continue;
      const int nb = itf.side_a.subdomain_id == host_id ? itf.side_b.subdomain_id : itf.side_a.subdomain_id;
      neighbors_.push_back(
          {std::make_shared<const RectPlan>(c.subdomain(nb)), coupling_map(c, itf, host_id), coupling_map(c, itf, nb)});
    }
  }

  int coupled_id() const { return host_id_; }
  std::size_t size() const { return center_->size(); }
  const RectPlan& center_plan() const { return *center_; }
  const std::vector<Neighbor>& neighbors() const { return neighbors_; }

  /// out = Σ R_ci A_i⁻¹ R_ic p, one rectangle solve per neighbour.
  void apply_schur(std::span<const double> p, std::span<double> out) const {
    check(p.size(), out.size());
    const long nn = static_cast<long>(neighbors_.size());
    std::vector<std::vector<double>> parts(neighbors_.size());
#pragma omp parallel for schedule(dynamic) if (nn > 1 && size() > 4096)
    for (long k = 0; k < nn; ++k) {
      const auto& nb = neighbors_[static_cast<std::size_t>(k)];
      std::vector<double> local(nb.plan->size(), 0.0);
      accumulate_R(nb.to_neighbor, p, local);
      nb.plan->solve(local, local);
      parts[static_cast<std::size_t>(k)].assign(size(), 0.0);
      accumulate_R(nb.to_host, local, parts[static_cast<std::size_t>(k)]);
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& part : parts) {
      for (std::size_t t = 0; t < out.size(); ++t) out[t] += part[t];
    }
  }

  /// out = p - A_c⁻¹ ΣS p
  void apply_preconditioned(std::span<const double> p, std::span<double> out) const {
    check(p.size(), out.size());
    std::vector<double> s(size());
    apply_schur(p, s);
    center_->solve(s, s);
    for (std::size_t t = 0; t < s.size(); ++t) out[t] = p[t] - s[t];
  }

  /// out = (A_c - ΣS) p
  void apply_unpreconditioned(std::span<const double> p, std::span<double> out) const {
    check(p.size(), out.size());
    std::vector<double> s(size());
    apply_schur(p, s);
    apply_rect_operator(center_->subdomain(), p, out);
    for (std::size_t t = 0; t < s.size(); ++t) out[t] -= s[t];
  }

  void solve_center(std::span<const double> f, std::span<double> p) const { center_->solve(f, p); }

 private:
  void check(std::size_t in, std::size_t out) const {
    if (in != size() || out != size()) {
      throw InvalidArgument("Schur operator on subdomain " + std::to_string(host_id_) + ": length mismatch");
    }
  }

  int host_id_;
  std::shared_ptr<const RectPlan> center_;
  std::vector<Neighbor> neighbors_;
};

namespace detail {
inline void check_host_field(const SchurOperator& op, const GridField& p) {
  if (p.subdomain_id != op.coupled_id()) {
    throw InvalidArgument("field on subdomain " + std::to_string(p.subdomain_id) + ", operator on " +
                          std::to_string(op.coupled_id()));
  }
}
}  // namespace detail

inline GridField apply_schur(const SchurOperator& op, const GridField& p) {
  detail::check_host_field(op, p);
  GridField out{p.subdomain_id, std::vector<double>(p.values.size())};
  op.apply_schur(p.values, out.values);
  return out;
}

inline GridField apply_preconditioned_operator(const SchurOperator& op, const GridField& p) {
  detail::check_host_field(op, p);
  GridField out{p.subdomain_id, std::vector<double>(p.values.size())};
  op.apply_preconditioned(p.values, out.values);
  return out;
}

}  // namespace fftddm
