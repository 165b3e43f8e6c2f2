#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dgdeform/fixtures.hpp"
#include "dgdeform/mc.hpp"

using namespace dgdeform;

namespace {
const FieldSpec Q{0};
const FieldSpec F3{3};
const FieldSpec F5{5};

template <class K>
VecX<K> elem(const MCContext<K>& ctx, const std::string& b, const std::string& r, K c) {
  VecX<K> v = VecX<K>::Zero(ctx.T().dim());
  v(ctx.t.ix.index(*ctx.B().space.find(b), *ctx.R().space.find(r))) = c;
  return v;
}

// a two-term complex over k whose endomorphism algebra has a degree -1 part
DGModule<Rat> two_term_module(FieldSpec f) {
  auto k = fixture_K<Rat>(f);
  DGModule<Rat> E;
  E.name = "two";
  E.over = k;
  E.side = Side::Right;
  E.space = GradedSpace({"u", "v"}, {0, 1});
  E.d = MatX<Rat>::Zero(2, 2);
  E.act = MatX<Rat>::Zero(2, 2);
  E.act(0, 0) = Rat(1);
  E.act(1, 1) = Rat(1);
  return E;
}

DGModule<Fp> two_term_module_fp(FieldSpec f) {
  auto k = fixture_K<Fp>(f);
  DGModule<Fp> E;
  E.name = "two";
  E.over = k;
  E.side = Side::Right;
  E.space = GradedSpace({"u", "v"}, {0, 1});
  E.d = MatX<Fp>::Zero(2, 2);
  E.act = MatX<Fp>::Zero(2, 2);
  E.act(0, 0) = Fp(1, f.p);
  E.act(1, 1) = Fp(1, f.p);
  return E;
}

}  // namespace

TEST_CASE("mc residual: zero is MC; t⊗eps over (P6,E3) has Q = t²⊗eps²") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_E3<Rat>(Q));
  auto zero = mc_residual(ctx, VecX<Rat>(VecX<Rat>::Zero(ctx.T().dim())));
  CHECK(zero.is_mc);
  VecX<Rat> alpha = elem<Rat>(ctx, "t", "eps", Rat(1));
  auto res = mc_residual(ctx, alpha);
  CHECK_FALSE(res.is_mc);
  VecX<Rat> expected = elem<Rat>(ctx, "t2", "eps2", Rat(1));
  CHECK(res.q == expected);
}

TEST_CASE("mc residual: 1⊗eps over (P6,D1) is MC by the Koszul sign") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_D1<Rat>(Q));
  VecX<Rat> alpha = elem<Rat>(ctx, "1", "eps", Rat(1));
  auto res = mc_residual(ctx, alpha);
  CHECK(res.is_mc);
}

TEST_CASE("mc residual rejects elements outside the ideal") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_D1<Rat>(Q));
  VecX<Rat> bad = elem<Rat>(ctx, "t", "1", Rat(1));
  CHECK_THROWS(mc_residual(ctx, bad));
}

TEST_CASE("gauge: identity fixes everything; unipotent g acts on 0 as g d(g^{-1})") {
  auto ctx = make_mc_context(fixture_ACY<Rat>(Q), fixture_E3<Rat>(Q));
  VecX<Rat> zero = VecX<Rat>::Zero(ctx.T().dim());
  CHECK(gauge_act(ctx, ctx.T().unit_vec(), zero) == zero);
  // g = 1 + a⊗eps: g(0) = g·d(g^{-1}); leading term -b⊗eps
  VecX<Rat> g = ctx.T().unit_vec() + elem<Rat>(ctx, "a", "eps", Rat(1));
  VecX<Rat> moved = gauge_act(ctx, g, zero);
  auto res = mc_residual(ctx, moved);
  CHECK(res.is_mc);
  CHECK(moved(ctx.t.ix.index(*ctx.B().space.find("b"), *ctx.R().space.find("eps"))) == Rat(-1));
}

TEST_CASE("gauge action is a group action preserving MC (random, F5)") {
  std::mt19937_64 rng(21);
  for (const char* bname : {"P6", "ACY"}) {
    auto ctx = make_mc_context(fixture_by_name<Fp>(bname, F5), fixture_E3<Fp>(F5));
    auto slots1 = ctx.ideal_slots(1);
    auto slots0 = ctx.ideal_slots(0);
    // find one MC object to act on: 0 always works
    for (int trial = 0; trial < 60; ++trial) {
      VecX<Fp> g = ctx.T().unit_vec(), h = ctx.T().unit_vec();
      for (Index s : slots0) {
        g(s) = Fp((long long)(rng() % 5), 5);
        h(s) = Fp((long long)(rng() % 5), 5);
      }
      VecX<Fp> alpha = VecX<Fp>::Zero(ctx.T().dim());
      for (Index s : slots1) alpha(s) = Fp((long long)(rng() % 5), 5);
      if (!mc_residual(ctx, alpha).is_mc) continue;
      VecX<Fp> lhs = gauge_act(ctx, ctx.T().mul(g, h), alpha);
      VecX<Fp> rhs = gauge_act(ctx, g, gauge_act(ctx, h, alpha));
      CHECK(lhs == rhs);
      CHECK(mc_residual(ctx, lhs).is_mc);
    }
  }
}

TEST_CASE("are_homotopic: reflexive, and equality when the homotopy space is empty") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_D1<Rat>(Q));
  CHECK(ctx.ideal_slots(-1).empty());
  VecX<Rat> alpha = elem<Rat>(ctx, "1", "eps", Rat(1));
  auto g = ctx.T().unit_vec();
  auto v = are_homotopic(ctx, g, g, alpha, alpha);
  CHECK(v.homotopic);
  CHECK(is_zero(v.witness));
}

TEST_CASE("homotopy solvability agrees with brute force over F3") {
  auto E = two_term_module_fp(F3);
  auto endE = algebra_from_ops(E, hom_complex(E, E).basis, "f");
  auto B = share(endE.algebra);
  auto ctx = make_mc_context(B, fixture_E3<Fp>(F3));
  auto slots1 = ctx.ideal_slots(1);
  auto slotsm1 = ctx.ideal_slots(-1);
  REQUIRE_FALSE(slotsm1.empty());
  // enumerate small MC objects and morphisms; brute-force the h-orbits
  auto en = enumerate_groupoid<Fp>(ctx, 1 << 22);
  REQUIRE(en.objects.size() >= 1);
  int checked = 0;
  for (std::size_t a = 0; a < en.objects.size() && checked < 4; ++a)
    for (std::size_t b = 0; b < en.objects.size() && checked < 4; ++b) {
      const VecX<Fp>&alpha = en.objects[a], &beta = en.objects[b];
      auto g0 = gauge_between(ctx, alpha, beta);
      if (!g0) continue;
      ++checked;
      // collect all maps via the affine system, then orbit them by brute h
      GaugeSystem<Fp> sys = gauge_system(ctx, alpha, beta);
      std::vector<VecX<Fp>> maps;
      for_each_fp_vector(sys.slots0, 3, ctx.T().dim(), 1 << 22, [&](const VecX<Fp>& u) {
        if (sys.L * [&] {
              VecX<Fp> uc(static_cast<Index>(sys.slots0.size()));
              for (std::size_t c = 0; c < sys.slots0.size(); ++c) uc(static_cast<Index>(c)) = u(sys.slots0[c]);
              return uc;
            }() == sys.rhs)
          maps.push_back(ctx.T().unit_vec() + u);
      });
      // brute orbits under h-translation
      std::vector<int> orbit(maps.size(), -1);
      int orbits = 0;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        if (orbit[i] >= 0) continue;
        int id = orbits++;
        orbit[i] = id;
        for_each_fp_vector(slotsm1, 3, ctx.T().dim(), 1 << 22, [&](const VecX<Fp>& h) {
          VecX<Fp> moved = maps[i] + ctx.T().d * h + ctx.T().mul(beta, h) + ctx.T().mul(h, alpha);
          for (std::size_t j = 0; j < maps.size(); ++j)
            if (orbit[j] < 0 && maps[j] == moved) orbit[j] = id;
        });
      }
      // linear count agrees
      CHECK(static_cast<std::uint64_t>(orbits) == hom_set_size(ctx, alpha, beta, 3));
      // pairwise are_homotopic agrees with orbit partition
      for (std::size_t i = 0; i < maps.size(); ++i)
        for (std::size_t j = 0; j < maps.size(); ++j)
          CHECK(are_homotopic(ctx, maps[i], maps[j], alpha, beta).homotopic ==
                (orbit[i] == orbit[j]));
    }
  CHECK(checked > 0);
}

TEST_CASE("homotopy congruence with composition (exhaustive, small fixture)") {
  auto E = two_term_module_fp(F3);
  auto endE = algebra_from_ops(E, hom_complex(E, E).basis, "f");
  auto ctx = make_mc_context(share(endE.algebra), fixture_E3<Fp>(F3));
  auto en = enumerate_groupoid<Fp>(ctx, 1 << 22);
  auto all_maps = [&](const VecX<Fp>& a, const VecX<Fp>& b) {
    std::vector<VecX<Fp>> maps;
    GaugeSystem<Fp> sys = gauge_system(ctx, a, b);
    for_each_fp_vector(sys.slots0, 3, ctx.T().dim(), 1 << 22, [&](const VecX<Fp>& u) {
      VecX<Fp> uc(static_cast<Index>(sys.slots0.size()));
      for (std::size_t c = 0; c < sys.slots0.size(); ++c) uc(static_cast<Index>(c)) = u(sys.slots0[c]);
      if (VecX<Fp>(sys.L * uc) == sys.rhs) maps.push_back(ctx.T().unit_vec() + u);
    });
    return maps;
  };
  int t = 0;
  for (std::size_t ia = 0; ia < en.objects.size() && t < 300; ++ia)
    for (std::size_t ib = 0; ib < en.objects.size() && t < 300; ++ib)
      for (std::size_t ic = 0; ic < en.objects.size() && t < 300; ++ic) {
        const auto &A = en.objects[ia], &B2 = en.objects[ib], &C = en.objects[ic];
        auto g1s = all_maps(A, B2);
        auto g23 = all_maps(B2, C);
        for (auto& g1 : g1s)
          for (auto& g2 : g23)
            for (auto& g3 : g23) {
              if (!are_homotopic(ctx, g2, g3, B2, C).homotopic) continue;
              ++t;
              CHECK(are_homotopic(ctx, ctx.T().mul(g2, g1), ctx.T().mul(g3, g1), A, C).homotopic);
            }
      }
  CHECK(t > 0);
}

TEST_CASE("enumeration: B=k over E3 has one object; hom set = gauge/homotopy count") {
  auto ctx = make_mc_context(fixture_K<Fp>(F3), fixture_E3<Fp>(F3));
  auto en = enumerate_groupoid<Fp>(ctx);
  CHECK(en.counts.objects == 1);
  CHECK(en.counts.orbit_sizes.size() == 1);
  CHECK(en.counts.hom_diag[0] == 9);  // 1 + m^0 is all of 1+m, no homotopies
  CHECK(en.counts.class_equation_ok);
}

TEST_CASE("enumeration: (P6, D1) over F3 has 3 singleton orbits with trivial homs") {
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_D1<Fp>(F3));
  auto en = enumerate_groupoid<Fp>(ctx);
  CHECK(en.counts.objects == 3);
  CHECK(en.counts.orbit_sizes.size() == 3);
  for (auto h : en.counts.hom_diag) CHECK(h == 1);
  CHECK(en.counts.class_equation_ok);
}

TEST_CASE("invariance instance: k vs ACY give identical counts over E3") {
  auto c1 = make_mc_context(fixture_K<Fp>(F3), fixture_E3<Fp>(F3));
  auto c2 = make_mc_context(fixture_ACY<Fp>(F3), fixture_E3<Fp>(F3));
  auto e1 = enumerate_groupoid<Fp>(c1);
  auto e2 = enumerate_groupoid<Fp>(c2);
  CHECK(e1.counts.orbit_sizes.size() == e2.counts.orbit_sizes.size());
  CHECK(e1.counts.hom_diag == e2.counts.hom_diag);
}

TEST_CASE("obstruction o2 on (P6,E3): ξ = t⊗ε̄ is obstructed, brute force finds no lift") {
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_E3<Fp>(F3));
  auto s = make_socle_step(ctx);
  // ξ in the quotient context
  VecX<Fp> xi = VecX<Fp>::Zero(s.quot.T().dim());
  {
    Index tq = *s.quot.B().space.find("t");
    // the quotient algebra relabels; find its degree-0 eps-bar representative
    bool placed = false;
    for (Index rb = 0; rb < s.quot.R().dim(); ++rb) {
      if (rb == s.quot.R().unit) continue;
      xi(s.quot.t.ix.index(tq, rb)) = Fp(1, 3);
      placed = true;
      break;
    }
    REQUIRE(placed);
  }
  REQUIRE(mc_residual(s.quot, xi).is_mc);
  auto cls = obstruction_o2(s, xi);
  CHECK_FALSE(cls.vanishes);
  CHECK(cls.h_dim >= 1);
  CHECK_FALSE(lift_mc(s, xi).has_value());
  // brute force: no element of (B⊗m)^1 projecting to ξ is MC
  auto slots1 = s.full.ideal_slots(1);
  bool found = false;
  for_each_fp_vector(slots1, 3, s.full.T().dim(), 1 << 22, [&](const VecX<Fp>& v) {
    if (VecX<Fp>(s.proj * v) == xi && mc_residual(s.full, v).is_mc) found = true;
  });
  CHECK_FALSE(found);
}

TEST_CASE("obstruction o2: zero lifts to zero") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_E3<Rat>(Q));
  auto s = make_socle_step(ctx);
  VecX<Rat> xi = VecX<Rat>::Zero(s.quot.T().dim());
  auto cls = obstruction_o2(s, xi);
  CHECK(cls.vanishes);
  auto lift = lift_mc(s, xi);
  REQUIRE(lift.has_value());
  CHECK(is_zero(*lift));
}

TEST_CASE("o2 is independent of the lift (random lift pairs)") {
  std::mt19937_64 rng(5);
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_E3<Fp>(F3));
  auto s = make_socle_step(ctx);
  VecX<Fp> xi = VecX<Fp>::Zero(s.quot.T().dim());
  Index tq = *s.quot.B().space.find("t");
  for (Index rb = 0; rb < s.quot.R().dim(); ++rb)
    if (rb != s.quot.R().unit) {
      xi(s.quot.t.ix.index(tq, rb)) = Fp(1, 3);
      break;
    }
  auto base = obstruction_o2(s, xi);
  // perturb the canonical lift by random elements of (B⊗I)^1 and recompute
  std::vector<Index> bi_slots1;
  for (Index g = 0; g < s.BI.cx.space.total_dim(); ++g)
    if (s.BI.cx.space.degree_of(g) == 1) bi_slots1.push_back(g);
  for (int trial = 0; trial < 20; ++trial) {
    VecX<Fp> noise = VecX<Fp>::Zero(s.BI.cx.space.total_dim());
    for (Index g : bi_slots1) noise(g) = Fp((long long)(rng() % 3), 3);
    VecX<Fp> tilde = lift_through(s, xi) + s.BI.inc * noise;
    VecX<Fp> q = s.full.T().d * tilde + s.full.T().mul(tilde, tilde);
    auto co = coords_in<Fp>(s.BI.inc, q);
    REQUIRE(co.has_value());
    auto H = complex_cohomology(s.BI.cx, Window::at(2, 2));
    VecX<Fp> cls = H[0].proj * s.BI.cx.space.slice_projection<Fp>(2) * *co;
    CHECK(cls == base.h_class);
  }
}

TEST_CASE("o1 on (P6,D1): [1⊗eps] is a nonzero class and no gauge map covers id") {
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_D1<Fp>(F3));
  auto s = make_socle_step(ctx);  // I = m, quotient = P6⊗k
  VecX<Fp> alpha = elem<Fp>(ctx, "1", "eps", Fp(1, 3));
  VecX<Fp> beta = VecX<Fp>::Zero(ctx.T().dim());
  auto cls = difference_o1(s, alpha, beta);
  CHECK_FALSE(cls.vanishes);
  CHECK_FALSE(gauge_between(ctx, alpha, beta).has_value());
  // torsor property: (α+η) − α = η for closed η in (B⊗I)^1
  auto H = complex_cohomology(s.BI.cx, Window::at(1, 1));
  for (Index j = 0; j < H[0].reps.cols(); ++j) {
    VecX<Fp> eta = s.BI.inc * s.BI.cx.space.slice_injection<Fp>(1) * H[0].reps.col(j);
    VecX<Fp> shifted = alpha + eta;
    CHECK(mc_residual(ctx, shifted).is_mc);
    auto diff = difference_o1(s, shifted, alpha);
    CHECK(s.BI.inc * diff.cocycle == eta);
  }
}

TEST_CASE("o1 exhaustive agreement with brute force on (P6,D1,F3)") {
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_D1<Fp>(F3));
  auto s = make_socle_step(ctx);
  auto en = enumerate_groupoid<Fp>(ctx);
  for (std::size_t a = 0; a < en.objects.size(); ++a)
    for (std::size_t b = 0; b < en.objects.size(); ++b) {
      if (!is_zero(VecX<Fp>(s.proj * (en.objects[a] - en.objects[b])))) continue;
      auto cls = difference_o1(s, en.objects[a], en.objects[b]);
      bool exists = gauge_between(ctx, en.objects[a], en.objects[b]).has_value();
      CHECK(cls.vanishes == exists);
    }
}

TEST_CASE("o0: closed non-exact difference separates lifts; exact difference is a homotopy") {
  // nonzero case on (P6, E3): Z0(B⊗I) = span(1⊗eps²), nothing exact
  auto ctx = make_mc_context(fixture_P6<Fp>(F3), fixture_E3<Fp>(F3));
  auto s = make_socle_step(ctx);
  VecX<Fp> f1 = ctx.T().unit_vec();
  VecX<Fp> v = elem<Fp>(ctx, "1", "eps2", Fp(1, 3));
  VecX<Fp> f2 = f1 + v;
  auto cls = morphism_o0(s, f1, f2);
  CHECK_FALSE(cls.vanishes);
  // brute force: no homotopy h ∈ (B⊗I)^{-1} sends f1 to f2 over α=β=0
  VecX<Fp> zero = VecX<Fp>::Zero(ctx.T().dim());
  std::vector<Index> bi_m1;
  for (Index g = 0; g < s.BI.cx.space.total_dim(); ++g)
    if (s.BI.cx.space.degree_of(g) == -1) bi_m1.push_back(g);
  CHECK(bi_m1.empty());  // nothing to translate by: f1 ≠ f2 as morphisms

  // exact case on (ACY, E3): v = d(a⊗eps²) pairs with the explicit homotopy
  auto ctx2 = make_mc_context(fixture_ACY<Fp>(F3), fixture_E3<Fp>(F3));
  auto s2 = make_socle_step(ctx2);
  VecX<Fp> u = elem<Fp>(ctx2, "a", "eps2", Fp(1, 3));
  VecX<Fp> vexact = ctx2.T().d * u;
  auto cls2 = morphism_o0(s2, ctx2.T().unit_vec(), VecX<Fp>(ctx2.T().unit_vec() + vexact));
  CHECK(cls2.vanishes);
  CHECK(s2.BI.inc * cls2.witness == u);
}

TEST_CASE("pushforward along R-quotient and along the unit inclusion on the B side") {
  auto ctx = make_mc_context(fixture_P6<Rat>(Q), fixture_E3<Rat>(Q));
  auto s = make_socle_step(ctx);
  // φ = id
  AlgebraHom<Rat> idh{ctx.t.R, ctx.t.R, MatX<Rat>::Identity(ctx.R().dim(), ctx.R().dim())};
  CHECK(validate_hom(idh).empty());
  VecX<Rat> zero = VecX<Rat>::Zero(ctx.T().dim());
  CHECK(pushforward_mc(ctx, ctx, idh, zero) == zero);
  // φ: E3 → E3/(eps²): t⊗eps maps to an MC element of the quotient
  auto qr = quotient_by_ideal(*ctx.t.R, ctx.profile.powers.back(), "E3bar");
  AlgebraHom<Rat> proj{ctx.t.R, share(qr.algebra), qr.proj};
  CHECK(validate_hom(proj).empty());
  auto ctxbar = make_mc_context(ctx.t.A, proj.target);
  VecX<Rat> alpha = elem<Rat>(ctx, "t", "eps", Rat(1));
  VecX<Rat> img = pushforward_mc(ctx, ctxbar, proj, alpha);
  CHECK(mc_residual(ctxbar, img).is_mc);
  CHECK_FALSE(is_zero(img));
  // ψ: k ↪ ACY on the algebra side
  auto ctxk = make_mc_context(fixture_K<Rat>(Q), fixture_E3<Rat>(Q));
  auto ACY = fixture_ACY<Rat>(Q);
  MatX<Rat> incl = MatX<Rat>::Zero(ACY->dim(), 1);
  incl(ACY->unit, 0) = Rat(1);
  AlgebraHom<Rat> psi{ctxk.t.A, ACY, incl};
  CHECK(validate_hom(psi).empty());
  auto ctxacy = make_mc_context(ACY, fixture_E3<Rat>(Q));
  VecX<Rat> zk = VecX<Rat>::Zero(ctxk.T().dim());
  CHECK(mc_residual(ctxacy, pushforward_algebra_side(ctxk, ctxacy, psi, zk)).is_mc);
}

TEST_CASE("restricted invariance: extra negative-degree cohomology does not change counts over dgart_-") {
  // B2 = ACY ⊕ k·w, |w| = -1, dw = 0, all products with w zero: H^{≥0}-iso to ACY
  auto B2 = share(AlgebraBuilder<Fp>("ACYw", F3)
                      .basis("1", 0)
                      .basis("a", 1)
                      .basis("b", 2)
                      .basis("w", -1)
                      .unit("1")
                      .diff("a", {{Fp(1, 3), "b"}})
                      .build_checked());
  for (const char* base : {"D0", "D1minus", "E3"}) {
    auto cA = make_mc_context(fixture_ACY<Fp>(F3), fixture_by_name<Fp>(base, F3));
    auto cB = make_mc_context(B2, fixture_by_name<Fp>(base, F3));
    auto eA = enumerate_groupoid<Fp>(cA);
    auto eB = enumerate_groupoid<Fp>(cB);
    CHECK(eA.counts.orbit_sizes.size() == eB.counts.orbit_sizes.size());
    CHECK(eA.counts.hom_diag == eB.counts.hom_diag);
  }
}
