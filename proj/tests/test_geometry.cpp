#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "fftddm/bench/cross.hpp"
#include "fftddm/geometry.hpp"
#include "test_support.hpp"

namespace fftddm {
namespace {

using testing_support::make_l_shape;

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

CompositeDomain cross(int kn = 2) { return bench::build_cross(1.0 / 7.0, kn).composite; }

TEST(LinearIndex, ColumnMajorByLine) {
  RectSubdomain s;
  s.m = 4;
  s.n = 3;
  EXPECT_EQ(linear_index(s, 1, 1), 0u);
  EXPECT_EQ(linear_index(s, 1, 3), 2u);
  EXPECT_EQ(linear_index(s, 2, 1), 3u);
  EXPECT_EQ(linear_index(s, 4, 3), 11u);
  EXPECT_THROW(linear_index(s, 0, 1), InvalidArgument);
  EXPECT_THROW(linear_index(s, 5, 1), InvalidArgument);
  EXPECT_THROW(linear_index(s, 1, 4), InvalidArgument);
}

TEST(LinearIndex, RoundTrip) {
  RectSubdomain s;
  s.m = 7;
  s.n = 5;
  for (std::size_t i = 1; i <= s.m; ++i) {
    for (std::size_t j = 1; j <= s.n; ++j) EXPECT_EQ(grid_index(s, linear_index(s, i, j)), (std::pair{i, j}));
  }
  EXPECT_THROW(grid_index(s, 35), InvalidArgument);
}

TEST(EdgeLine, OrderedAlongEdge) {
  RectSubdomain s;
  s.m = 3;
  s.n = 2;
  EXPECT_EQ(edge_line(s, Edge::West), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(edge_line(s, Edge::East), (std::vector<std::size_t>{4, 5}));
  EXPECT_EQ(edge_line(s, Edge::South), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(edge_line(s, Edge::North), (std::vector<std::size_t>{1, 3, 5}));
}

TEST(RectSubdomain, NodePlacement) {
  RectSubdomain s;
  s.x0 = 1.0;
  s.y0 = 2.0;
  s.m = 4;
  s.n = 3;
  s.dx = 0.25;
  s.dy = 0.5;
  s.edge_bc = {BoundaryKind::DirichletFace, BoundaryKind::Interface, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  EXPECT_DOUBLE_EQ(s.node_x(1), 1.125);
  EXPECT_DOUBLE_EQ(s.extent_x(), 1.0);
  EXPECT_DOUBLE_EQ(s.node_y(1), 2.5);
  EXPECT_DOUBLE_EQ(s.extent_y(), 2.0);
  EXPECT_FALSE(s.transformable(Axis::X));
  EXPECT_TRUE(s.transformable(Axis::Y));
}

TEST(Validate, CrossIsValid) {
  const auto c = cross();
  const auto r = validate(c);
  EXPECT_TRUE(r.ok()) << r.summary();
  EXPECT_EQ(c.coupled_ids(), (std::vector<int>{0}));
  EXPECT_EQ(c.independent_ids(), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(c.total_unknowns(), 34u * 4u);
}

TEST(Validate, LShapeIsValid) {
  const auto c = make_l_shape(3);
  EXPECT_TRUE(validate(c).ok()) << validate(c).summary();
  EXPECT_EQ(c.coupled_ids(), (std::vector<int>{0}));
}

TEST(Validate, InterfaceNodeMismatch) {
  auto subs = cross().subdomains();
  subs[bench::kEast].n += 1;
  std::vector<Interface> itfs;
  itfs.push_back(make_interface(0, subs[bench::kWest], Edge::East, subs[bench::kCenter], Edge::West));
  itfs.push_back(make_interface(1, subs[bench::kCenter], Edge::East, subs[bench::kEast], Edge::West));
  itfs.push_back(make_interface(2, subs[bench::kSouth], Edge::North, subs[bench::kCenter], Edge::South));
  itfs.push_back(make_interface(3, subs[bench::kCenter], Edge::North, subs[bench::kNorth], Edge::South));
  const auto r = validate(CompositeDomain(subs, itfs));
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r, "interface node mismatch")) << r.summary();
}

TEST(Validate, MixedPairReported) {
  auto subs = cross().subdomains();
  subs[bench::kWest].edge_bc[static_cast<int>(Edge::South)] = BoundaryKind::Dirichlet;
  const auto r = validate(CompositeDomain(subs, cross().interfaces()));
  EXPECT_TRUE(mentions(r, "mixed boundary pair")) << r.summary();
}

TEST(Validate, MissingInterfaceBreaksConnectivity) {
  auto itfs = cross().interfaces();
  itfs.pop_back();
  auto subs = cross().subdomains();
  subs[bench::kCenter].edge_bc[static_cast<int>(Edge::North)] = BoundaryKind::DirichletFace;
  subs[bench::kNorth].edge_bc[static_cast<int>(Edge::South)] = BoundaryKind::DirichletFace;
  const auto r = validate(CompositeDomain(subs, itfs));
  EXPECT_TRUE(mentions(r, "not connected")) << r.summary();
}

TEST(Validate, UnreferencedInterfaceEdge) {
  auto itfs = cross().interfaces();
  itfs.pop_back();
  const auto r = validate(CompositeDomain(cross().subdomains(), itfs));
  EXPECT_TRUE(mentions(r, "referenced by 0")) << r.summary();
}

TEST(Validate, PeriodicParityAndMatching) {
  RectSubdomain s;
  s.m = 3;
  s.n = 4;
  s.edge_bc = {BoundaryKind::Periodic, BoundaryKind::Periodic, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  EXPECT_TRUE(mentions(validate(CompositeDomain({s}, {})), "even node count"));
  s.edge_bc = {BoundaryKind::Periodic, BoundaryKind::Neumann, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
  EXPECT_TRUE(mentions(validate(CompositeDomain({s}, {})), "unmatched periodic"));
}

TEST(Validate, FaceWallsOnBothAxesRejected) {
  RectSubdomain s;
  s.m = 3;
  s.n = 3;
  s.edge_bc = {BoundaryKind::DirichletFace, BoundaryKind::DirichletFace, BoundaryKind::DirichletFace,
               BoundaryKind::Dirichlet};
  EXPECT_TRUE(mentions(validate(CompositeDomain({s}, {})), "no transformable axis"));
}

TEST(Validate, WrongCouplingAndIndexMap) {
  auto itfs = cross().interfaces();
  itfs[1].coupling *= 2.0;
  std::swap(itfs[2].index_map[0], itfs[2].index_map[1]);
  const auto r = validate(CompositeDomain(cross().subdomains(), itfs));
  EXPECT_TRUE(mentions(r, "coupling")) << r.summary();
  EXPECT_TRUE(mentions(r, "index map")) << r.summary();
}

TEST(Validate, DisplacedArmIsNotCoincident) {
  auto subs = cross().subdomains();
  subs[bench::kEast].x0 += 0.01;
  const auto r = validate(CompositeDomain(subs, cross().interfaces()));
  EXPECT_TRUE(mentions(r, "coincident")) << r.summary();
}

TEST(Validate, CoupledNeighboursRejected) {
  // A chain of three where the middle two both have degree two.
  using BK = BoundaryKind;
  auto sq = [](int id, double x0, BK w, BK e) {
    RectSubdomain r;
    r.id = id;
    r.x0 = x0;
    r.m = 2;
    r.n = 2;
    r.dx = 0.5;
    r.dy = 0.5;
    r.edge_bc = {w, e, BK::DirichletFace, BK::DirichletFace};
    return r;
  };
  std::vector<RectSubdomain> s{sq(0, 0, BK::Dirichlet, BK::Interface), sq(1, 1, BK::Interface, BK::Interface),
                               sq(2, 2, BK::Interface, BK::Interface), sq(3, 3, BK::Interface, BK::Dirichlet)};
  std::vector<Interface> itfs{make_interface(0, s[0], Edge::East, s[1], Edge::West),
                              make_interface(1, s[1], Edge::East, s[2], Edge::West),
                              make_interface(2, s[2], Edge::East, s[3], Edge::West)};
  EXPECT_TRUE(mentions(validate(CompositeDomain(s, itfs)), "share an interface"));
}

TEST(Validate, DuplicateIds) {
  auto subs = cross().subdomains();
  subs[bench::kNorth].id = bench::kSouth;
  EXPECT_TRUE(mentions(validate(CompositeDomain(subs, {})), "duplicate subdomain id"));
}

TEST(ValidateProperties, SingleEditCorruptionsAreCaught) {
  const auto base = cross(3);
  ASSERT_TRUE(validate(base).ok());
  for (std::size_t k = 0; k < base.subdomains().size(); ++k) {
    for (Edge e : kAllEdges) {
      for (BoundaryKind kind : {BoundaryKind::Dirichlet, BoundaryKind::DirichletFace, BoundaryKind::Neumann,
                                BoundaryKind::Periodic, BoundaryKind::Interface}) {
        auto subs = base.subdomains();
        if (subs[k].bc(e) == kind) continue;
        const bool was_interface = subs[k].bc(e) == BoundaryKind::Interface;
        subs[k].edge_bc[static_cast<int>(e)] = kind;
        const auto r = validate(CompositeDomain(subs, base.interfaces()));
        // Swapping one wall kind for another of the same family is legal.
        const bool same_family = !was_interface && kind != BoundaryKind::Interface &&
                                 subs[k].axis_family(normal_axis(e)).has_value() &&
                                 (subs[k].transformable(Axis::X) || subs[k].transformable(Axis::Y));
        if (!same_family) {
          EXPECT_FALSE(r.ok()) << "subdomain " << k << " " << to_string(e) << " -> " << to_string(kind);
        }
      }
    }
  }
}

}  // namespace
}  // namespace fftddm
