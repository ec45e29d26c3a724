#pragma once

// Rectangles, boundary descriptors, interfaces and composite domains.
//
// Field layout: a rectangle with m node lines along x and n nodes per line
// stores node (i, j) (1-based) at flat index (i-1)*n + (j-1), i.e. m
// consecutive y-lines of length n.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fftddm/error.hpp"

namespace fftddm {

/// Per-edge boundary condition.
///
/// Dirichlet places the wall on the ghost node line one spacing beyond the
/// outermost nodes (zero ghost value). DirichletFace places the wall half a
/// spacing beyond the outermost nodes and imposes it with a reflected ghost
/// (p_ghost = -p). Neumann walls always sit half a spacing out (p_ghost = p).
/// Interface edges behave as homogeneous Dirichlet inside the rectangle's
/// own operator; the cross-interface coupling lives in the interface maps.
enum class BoundaryKind { Dirichlet, DirichletFace, Neumann, Periodic, Interface };

enum class Edge : int { West = 0, East = 1, South = 2, North = 3 };

enum class Axis { X, Y };

/// Boundary pair family of one axis after mapping Interface and
/// DirichletFace onto Dirichlet.
enum class AxisBC { DD, NN, PP };

inline constexpr std::array<Edge, 4> kAllEdges{Edge::West, Edge::East, Edge::South, Edge::North};

inline std::string_view to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::DirichletFace: return "dirichlet_face";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Interface: return "interface";
  }
  return "?";
}

inline std::string_view to_string(Edge e) {
  switch (e) {
    case Edge::West: return "west";
    case Edge::East: return "east";
    case Edge::South: return "south";
    case Edge::North: return "north";
  }
  return "?";
}

inline std::string_view to_string(AxisBC bc) {
  switch (bc) {
    case AxisBC::DD: return "DD";
    case AxisBC::NN: return "NN";
    case AxisBC::PP: return "PP";
  }
  return "?";
}

inline std::optional<BoundaryKind> parse_boundary_kind(std::string_view s) {
  for (auto k : {BoundaryKind::Dirichlet, BoundaryKind::DirichletFace, BoundaryKind::Neumann,
                 BoundaryKind::Periodic, BoundaryKind::Interface}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

inline std::optional<Edge> parse_edge(std::string_view s) {
  for (auto e : kAllEdges) {
    if (s == to_string(e)) return e;
  }
  return std::nullopt;
}

inline Edge opposite(Edge e) {
  switch (e) {
    case Edge::West: return Edge::East;
    case Edge::East: return Edge::West;
    case Edge::South: return Edge::North;
    case Edge::North: return Edge::South;
  }
  return e;
}

/// Axis normal to an edge.
inline Axis normal_axis(Edge e) { return (e == Edge::West || e == Edge::East) ? Axis::X : Axis::Y; }

inline bool is_dirichlet_like(BoundaryKind k) {
  return k == BoundaryKind::Dirichlet || k == BoundaryKind::DirichletFace || k == BoundaryKind::Interface;
}

/// True when the wall sits half a spacing beyond the outermost node line.
inline bool face_placed(BoundaryKind k) { return k != BoundaryKind::Dirichlet; }

struct RectSubdomain {
  int id = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::size_t m = 1;  // node lines along x
  std::size_t n = 1;  // nodes per line along y
  double dx = 1.0;
  double dy = 1.0;
  double kappa = 0.0;
  std::array<BoundaryKind, 4> edge_bc{BoundaryKind::Dirichlet, BoundaryKind::Dirichlet,
                                      BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};

  BoundaryKind bc(Edge e) const { return edge_bc[static_cast<int>(e)]; }
  double delta_x() const { return 1.0 / (dx * dx); }
  double delta_y() const { return 1.0 / (dy * dy); }
  double delta(Axis a) const { return a == Axis::X ? delta_x() : delta_y(); }
  double spacing(Axis a) const { return a == Axis::X ? dx : dy; }
  std::size_t count(Axis a) const { return a == Axis::X ? m : n; }
  std::size_t size() const { return m * n; }

  std::pair<BoundaryKind, BoundaryKind> axis_pair(Axis a) const {
    return a == Axis::X ? std::pair{bc(Edge::West), bc(Edge::East)} : std::pair{bc(Edge::South), bc(Edge::North)};
  }

  /// BC family of an axis, or nullopt for a mixed pair.
  std::optional<AxisBC> axis_family(Axis a) const {
    const auto [lo, hi] = axis_pair(a);
    if (lo == BoundaryKind::Periodic && hi == BoundaryKind::Periodic) return AxisBC::PP;
    if (lo == BoundaryKind::Neumann && hi == BoundaryKind::Neumann) return AxisBC::NN;
    if (is_dirichlet_like(lo) && is_dirichlet_like(hi)) return AxisBC::DD;
    return std::nullopt;
  }

  /// An axis admits the FFT eigenbasis when its pair is DD (zero-ghost walls
  /// only), NN or PP.
  bool transformable(Axis a) const {
    const auto fam = axis_family(a);
    if (!fam) return false;
    if (*fam != AxisBC::DD) return true;
    const auto [lo, hi] = axis_pair(a);
    return lo != BoundaryKind::DirichletFace && hi != BoundaryKind::DirichletFace;
  }

  double first_node_offset(Axis a) const {
    const auto lo = axis_pair(a).first;
    return face_placed(lo) ? 0.5 * spacing(a) : spacing(a);
  }

  double extent(Axis a) const {
    const auto [lo, hi] = axis_pair(a);
    const double h = spacing(a);
    return (face_placed(lo) ? 0.5 * h : h) + static_cast<double>(count(a) - 1) * h +
           (face_placed(hi) ? 0.5 * h : h);
  }
  double extent_x() const { return extent(Axis::X); }
  double extent_y() const { return extent(Axis::Y); }

  /// Coordinates of node line i (1-based) and node j (1-based).
  double node_x(std::size_t i) const { return x0 + first_node_offset(Axis::X) + static_cast<double>(i - 1) * dx; }
  double node_y(std::size_t j) const { return y0 + first_node_offset(Axis::Y) + static_cast<double>(j - 1) * dy; }
};

/// Flat index of node (i, j), both 1-based.
inline std::size_t linear_index(const RectSubdomain& s, std::size_t i, std::size_t j) {
  if (i < 1 || i > s.m || j < 1 || j > s.n) {
    std::ostringstream os;
    os << "node (" << i << ", " << j << ") outside " << s.m << "x" << s.n << " grid of subdomain " << s.id;
    throw InvalidArgument(os.str());
  }
  return (i - 1) * s.n + (j - 1);
}

/// Inverse of linear_index.
inline std::pair<std::size_t, std::size_t> grid_index(const RectSubdomain& s, std::size_t flat) {
  if (flat >= s.size()) throw InvalidArgument("flat index outside subdomain grid");
  return {flat / s.n + 1, flat % s.n + 1};
}

/// Flat indices of the node line adjacent to an edge, ordered by increasing
/// coordinate along the edge.
inline std::vector<std::size_t> edge_line(const RectSubdomain& s, Edge e) {
  std::vector<std::size_t> out;
  switch (e) {
    case Edge::West:
    case Edge::East: {
      const std::size_t i = e == Edge::West ? 1 : s.m;
      out.reserve(s.n);
      for (std::size_t j = 1; j <= s.n; ++j) out.push_back(linear_index(s, i, j));
      break;
    }
    case Edge::South:
    case Edge::North: {
      const std::size_t j = e == Edge::South ? 1 : s.n;
      out.reserve(s.m);
      for (std::size_t i = 1; i <= s.m; ++i) out.push_back(linear_index(s, i, j));
      break;
    }
  }
  return out;
}

struct GridField {
  int subdomain_id = 0;
  std::vector<double> values;

  static GridField zeros(const RectSubdomain& s) { return GridField{s.id, std::vector<double>(s.size(), 0.0)}; }
};

struct InterfaceSide {
  int subdomain_id = 0;
  Edge edge = Edge::East;
};

struct Interface {
  int id = 0;
  InterfaceSide side_a;
  InterfaceSide side_b;
  /// δ = 1/Δ² along the interface normal.
  double coupling = 0.0;
  /// (flat index on side_a, flat index on side_b) for each pair of
  /// neighbouring nodes across the interface.
  std::vector<std::pair<std::size_t, std::size_t>> index_map;
};

/// Builds the interface record between two rectangles from their geometry.
/// No validation beyond what is needed to construct it; run validate() on
/// the resulting composite.
inline Interface make_interface(int id, const RectSubdomain& a, Edge edge_a, const RectSubdomain& b, Edge edge_b) {
  Interface itf;
  itf.id = id;
  itf.side_a = {a.id, edge_a};
  itf.side_b = {b.id, edge_b};
  itf.coupling = a.delta(normal_axis(edge_a));
  const auto la = edge_line(a, edge_a);
  const auto lb = edge_line(b, edge_b);
  const std::size_t k = std::min(la.size(), lb.size());
  itf.index_map.reserve(k);
  for (std::size_t t = 0; t < k; ++t) itf.index_map.emplace_back(la[t], lb[t]);
  return itf;
}

class CompositeDomain {
 public:
  CompositeDomain() = default;
  CompositeDomain(std::vector<RectSubdomain> subdomains, std::vector<Interface> interfaces)
      : subdomains_(std::move(subdomains)), interfaces_(std::move(interfaces)) {
    std::map<int, int> degree;
    for (const auto& s : subdomains_) degree[s.id] = 0;
    for (const auto& itf : interfaces_) {
      ++degree[itf.side_a.subdomain_id];
      if (itf.side_b.subdomain_id != itf.side_a.subdomain_id) ++degree[itf.side_b.subdomain_id];
    }
    for (const auto& s : subdomains_) {
      if (degree[s.id] >= 2) coupled_ids_.push_back(s.id);
      if (degree[s.id] == 1) independent_ids_.push_back(s.id);
    }
  }

  const std::vector<RectSubdomain>& subdomains() const { return subdomains_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }
  /// Subdomains touching two or more interfaces.
  const std::vector<int>& coupled_ids() const { return coupled_ids_; }
  /// Subdomains touching exactly one interface.
  const std::vector<int>& independent_ids() const { return independent_ids_; }

  std::size_t index_of(int id) const {
    for (std::size_t k = 0; k < subdomains_.size(); ++k) {
      if (subdomains_[k].id == id) return k;
    }
    throw InvalidArgument("unknown subdomain id " + std::to_string(id));
  }
  const RectSubdomain& subdomain(int id) const { return subdomains_[index_of(id)]; }

  std::size_t total_unknowns() const {
    std::size_t total = 0;
    for (const auto& s : subdomains_) total += s.size();
    return total;
  }

 private:
  std::vector<RectSubdomain> subdomains_;
  std::vector<Interface> interfaces_;
  std::vector<int> coupled_ids_;
  std::vector<int> independent_ids_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v;
    }
    return out;
  }
};

namespace detail {

inline bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * std::max(1.0, scale); }

inline void validate_rect(const RectSubdomain& s, std::vector<std::string>& out) {
  const std::string tag = "subdomain " + std::to_string(s.id) + ": ";
  if (s.m < 1 || s.n < 1) out.push_back(tag + "node counts must be >= 1");
  if (!(s.dx > 0.0) || !(s.dy > 0.0) || !std::isfinite(s.dx) || !std::isfinite(s.dy)) {
    out.push_back(tag + "grid spacings must be positive and finite");
  }
  if (!std::isfinite(s.kappa) || !std::isfinite(s.x0) || !std::isfinite(s.y0)) {
    out.push_back(tag + "non-finite origin or kappa");
  }
  for (Axis a : {Axis::X, Axis::Y}) {
    const char* name = a == Axis::X ? "x" : "y";
    const auto [lo, hi] = s.axis_pair(a);
    if ((lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic)) {
      out.push_back(tag + "unmatched periodic edge on " + name + " axis");
      continue;
    }
    const auto fam = s.axis_family(a);
    if (!fam) {
      out.push_back(tag + "mixed boundary pair on " + name + " axis (" + std::string(to_string(lo)) + "-" +
                    std::string(to_string(hi)) + ")");
      continue;
    }
    if (*fam == AxisBC::PP && s.count(a) % 2 != 0) {
      out.push_back(tag + "periodic " + name + " axis needs an even node count");
    }
  }
  if (s.axis_family(Axis::X) && s.axis_family(Axis::Y) && !s.transformable(Axis::X) &&
      !s.transformable(Axis::Y)) {
    out.push_back(tag + "no transformable axis (dirichlet_face walls on both axes)");
  }
}

/// Position of an edge line and its span along the edge.
struct EdgeGeometry {
  double position;
  double lo;
  double hi;
};

inline EdgeGeometry edge_geometry(const RectSubdomain& s, Edge e) {
  switch (e) {
    case Edge::West: return {s.x0, s.y0, s.y0 + s.extent_y()};
    case Edge::East: return {s.x0 + s.extent_x(), s.y0, s.y0 + s.extent_y()};
    case Edge::South: return {s.y0, s.x0, s.x0 + s.extent_x()};
    case Edge::North: return {s.y0 + s.extent_y(), s.x0, s.x0 + s.extent_x()};
  }
  return {0, 0, 0};
}

}  // namespace detail

/// Checks every structural invariant of a composite and lists violations.
inline ValidationReport validate(const CompositeDomain& composite) {
  ValidationReport report;
  auto& out = report.violations;
  const auto& subs = composite.subdomains();
  const auto& itfs = composite.interfaces();

  if (subs.empty()) {
    out.push_back("composite has no subdomains");
    return report;
  }

  std::set<int> ids;
  for (const auto& s : subs) {
    if (!ids.insert(s.id).second) out.push_back("duplicate subdomain id " + std::to_string(s.id));
    detail::validate_rect(s, out);
  }
  std::set<int> itf_ids;
  for (const auto& itf : itfs) {
    if (!itf_ids.insert(itf.id).second) out.push_back("duplicate interface id " + std::to_string(itf.id));
  }
  if (!out.empty()) return report;

  // Each Interface edge must be claimed by exactly one interface record.
  std::map<std::pair<int, int>, int> edge_refs;
  for (const auto& itf : itfs) {
    const std::string tag = "interface " + std::to_string(itf.id) + ": ";
    if (!ids.count(itf.side_a.subdomain_id) || !ids.count(itf.side_b.subdomain_id)) {
      out.push_back(tag + "references an unknown subdomain");
      continue;
    }
    if (itf.side_a.subdomain_id == itf.side_b.subdomain_id) {
      out.push_back(tag + "both sides on the same subdomain");
      continue;
    }
    ++edge_refs[{itf.side_a.subdomain_id, static_cast<int>(itf.side_a.edge)}];
    ++edge_refs[{itf.side_b.subdomain_id, static_cast<int>(itf.side_b.edge)}];

    const auto& a = composite.subdomain(itf.side_a.subdomain_id);
    const auto& b = composite.subdomain(itf.side_b.subdomain_id);
    if (a.bc(itf.side_a.edge) != BoundaryKind::Interface || b.bc(itf.side_b.edge) != BoundaryKind::Interface) {
      out.push_back(tag + "sides must be interface edges");
      continue;
    }
    if (itf.side_b.edge != opposite(itf.side_a.edge)) {
      out.push_back(tag + "edges are not facing each other");
      continue;
    }
    const Axis normal = normal_axis(itf.side_a.edge);
    const Axis along = normal == Axis::X ? Axis::Y : Axis::X;
    const auto ga = detail::edge_geometry(a, itf.side_a.edge);
    const auto gb = detail::edge_geometry(b, itf.side_b.edge);
    const double scale = std::max({std::abs(ga.position), std::abs(ga.hi), a.extent_x(), a.extent_y()});
    if (a.count(along) != b.count(along)) {
      out.push_back(tag + "interface node mismatch (" + std::to_string(a.count(along)) + " vs " +
                    std::to_string(b.count(along)) + ")");
      continue;
    }
    if (!detail::close(a.spacing(along), b.spacing(along), a.spacing(along)) ||
        !detail::close(a.spacing(normal), b.spacing(normal), a.spacing(normal))) {
      out.push_back(tag + "grid spacing differs across the interface");
      continue;
    }
    if (!detail::close(ga.position, gb.position, scale) || !detail::close(ga.lo, gb.lo, scale) ||
        !detail::close(ga.hi, gb.hi, scale)) {
      out.push_back(tag + "edges are not geometrically coincident");
      continue;
    }
    const double expected = a.delta(normal);
    if (std::abs(itf.coupling - expected) > 1e-12 * expected) {
      out.push_back(tag + "coupling differs from 1/spacing^2 normal to the interface");
    }
    const auto la = edge_line(a, itf.side_a.edge);
    const auto lb = edge_line(b, itf.side_b.edge);
    bool map_ok = itf.index_map.size() == la.size();
    for (std::size_t t = 0; map_ok && t < la.size(); ++t) {
      map_ok = itf.index_map[t] == std::pair{la[t], lb[t]};
    }
    if (!map_ok) out.push_back(tag + "index map does not pair the adjacent node lines");
  }
  for (const auto& s : subs) {
    for (Edge e : kAllEdges) {
      if (s.bc(e) != BoundaryKind::Interface) continue;
      const int refs = edge_refs[{s.id, static_cast<int>(e)}];
      if (refs != 1) {
        out.push_back("subdomain " + std::to_string(s.id) + ": " + std::string(to_string(e)) +
                      " interface edge referenced by " + std::to_string(refs) + " interface records");
      }
    }
  }

  // Connectivity of the interface graph.
  std::map<int, std::vector<int>> adj;
  for (const auto& itf : itfs) {
    adj[itf.side_a.subdomain_id].push_back(itf.side_b.subdomain_id);
    adj[itf.side_b.subdomain_id].push_back(itf.side_a.subdomain_id);
  }
  std::set<int> seen{subs.front().id};
  std::queue<int> frontier;
  frontier.push(subs.front().id);
  while (!frontier.empty()) {
    const int cur = frontier.front();
    frontier.pop();
    for (int nb : adj[cur]) {
      if (seen.insert(nb).second) frontier.push(nb);
    }
  }
  if (seen.size() != subs.size()) out.push_back("interface graph is not connected");

  // Coupled subdomains may only neighbour independent ones.
  const auto& coupled = composite.coupled_ids();
  for (int c : coupled) {
    for (int nb : adj[c]) {
      if (std::find(coupled.begin(), coupled.end(), nb) != coupled.end()) {
        out.push_back("coupled subdomains " + std::to_string(c) + " and " + std::to_string(nb) +
                      " share an interface");
      }
    }
  }
  return report;
}

}  // namespace fftddm
