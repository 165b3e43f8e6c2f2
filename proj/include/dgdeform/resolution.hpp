#pragma once

#include <functional>

#include "dgdeform/dgmod.hpp"

namespace dgdeform {

struct ResolutionError : std::runtime_error {
  std::vector<int> unstable_degrees;
  ResolutionError(const std::string& what, std::vector<int> degs)
      : std::runtime_error(what), unstable_degrees(std::move(degs)) {}
};

// Semifree resolution P -> N built by killing cone cohomology stage by stage.
// P is free on the ledgered generators; the freeze frontier records which
// degrees of the construction can no longer change, which is what certifies
// windowed Ext/Tor values read off a finite truncation.
template <class K>
struct Resolution {
  enum class Mode { NonnegConnected, Nonpositive, CompleteOnly };

  AlgebraPtr<K> base;
  DGModule<K> target;          // N
  GradedSpace gen_space;       // one slot per adjoined generator
  std::vector<int> gen_stage;  // stage at which each generator appeared
  DGModule<K> P;               // free module on the generators
  TensorIndexer pix;           // (generator, algebra basis) -> P coordinate
  MatX<K> eps;                 // P -> N
  Mode mode = Mode::CompleteOnly;
  bool complete = false;       // cone is globally acyclic
  std::optional<int> frontier; // extreme degree still in motion (see mode)

  bool degree_final(int n) const {
    if (complete) return true;
    if (!frontier) return false;
    if (mode == Mode::NonnegConnected) return n < *frontier;
    if (mode == Mode::Nonpositive) return n > *frontier;
    return false;
  }
  bool window_final(Window w) const {
    for (int n = w.lo; n <= w.hi; ++n)
      if (!degree_final(n)) return false;
    return true;
  }
};

namespace detail {

template <class K>
DGModule<K> free_module_on(AlgebraPtr<K> B, const GradedSpace& gens, const TensorIndexer& pix,
                           const MatX<K>& gen_d /* P-coords of d(gen), one column per gen */) {
  const Index ng = gens.total_dim(), nb = B->dim(), n = ng * nb;
  DGModule<K> P;
  P.name = "P";
  P.over = B;
  P.side = Side::Right;
  P.space = pix.space();
  P.act = MatX<K>::Zero(nb * n, n);
  for (Index g = 0; g < ng; ++g)
    for (Index a = 0; a < nb; ++a) {
      Index slot = pix.index(g, a);
      for (Index b = 0; b < nb; ++b) {
        VecX<K> prod = B->basis_mul(a, b);
        for (Index c = 0; c < nb; ++c)
          if (!prod(c).is_zero()) P.act(b * n + slot, pix.index(g, c)) += prod(c);
      }
    }
  // d(g·a) = d(g)·a + (-1)^{|g|} g·da
  P.d = MatX<K>::Zero(n, n);
  for (Index g = 0; g < ng; ++g) {
    K sg = sign_of<K>(gens.degree_of(g));
    for (Index a = 0; a < nb; ++a) {
      Index slot = pix.index(g, a);
      VecX<K> da = B->diff(B->basis_vec(a));
      for (Index c = 0; c < nb; ++c)
        if (!da(c).is_zero()) P.d(pix.index(g, c), slot) += sg * da(c);
      if (a == B->unit) {
        P.d.col(slot) += gen_d.col(g);
      } else {
        // d(gen)·a
        VecX<K> dg = gen_d.col(g);
        for (Index p = 0; p < n; ++p) {
          if (dg(p).is_zero()) continue;
          auto [g2, b2] = pix.split(p);
          VecX<K> prod = B->basis_mul(b2, a);
          for (Index c = 0; c < nb; ++c)
            if (!prod(c).is_zero()) P.d(pix.index(g2, c), slot) += dg(p) * prod(c);
        }
      }
    }
  }
  return P;
}

}  // namespace detail

// Fast path: if N is free on lifts of its fiber generators and the generator
// differential is stage-orderable, N is its own resolution.
template <class K>
std::optional<Resolution<K>> already_semifree(const DGModule<K>& N) {
  AlgebraPtr<K> B = N.over;
  const Index nb = B->dim(), nn = N.dim();
  if (nn == 0) return std::nullopt;
  // fiber = N / N·(non-unit basis span)
  std::vector<VecX<K>> gens;
  for (Index b = 0; b < nb; ++b) {
    if (b == B->unit) continue;
    for (Index m = 0; m < nn; ++m) {
      VecX<K> v = N.basis_act(b, m);
      if (!is_zero(v)) gens.push_back(std::move(v));
    }
  }
  MatX<K> sub(nn, static_cast<Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) sub.col(static_cast<Index>(i)) = gens[i];
  sub = column_space<K>(sub);
  MatX<K> lifts = sort_columns_by_degree<K>(
      N.space, extend_basis<K>(sub, MatX<K>(MatX<K>::Identity(nn, nn))));
  const Index ng = lifts.cols();
  if (ng * nb != nn) return std::nullopt;
  std::vector<std::string> labels;
  std::vector<int> degs;
  for (Index g = 0; g < ng; ++g) {
    labels.push_back("g" + std::to_string(g));
    degs.push_back(column_degree<K>(N.space, VecX<K>(lifts.col(g))));
  }
  GradedSpace gsp(labels, degs);  // lifts were degree-sorted, order preserved
  TensorIndexer pix(gsp, B->space, "·");
  MatX<K> pairing(nn, nn);
  for (Index g = 0; g < ng; ++g)
    for (Index a = 0; a < nb; ++a)
      pairing.col(pix.index(g, a)) = N.apply(B->basis_vec(a), VecX<K>(lifts.col(g)));
  auto inv = inverse<K>(pairing);
  if (!inv) return std::nullopt;
  MatX<K> gen_d(nn, ng);
  for (Index g = 0; g < ng; ++g) gen_d.col(g) = *inv * (N.d * lifts.col(g));
  // stage order: d(g) may only involve strictly earlier generators
  std::vector<std::vector<Index>> deps(static_cast<std::size_t>(ng));
  for (Index g = 0; g < ng; ++g)
    for (Index p = 0; p < nn; ++p)
      if (!gen_d(p, g).is_zero()) deps[static_cast<std::size_t>(g)].push_back(pix.split(p).first);
  std::vector<int> depth(static_cast<std::size_t>(ng), -1);
  std::function<bool(Index, std::vector<Index>&)> visit = [&](Index g, std::vector<Index>& path) {
    if (depth[static_cast<std::size_t>(g)] >= 0) return true;
    for (Index on_path : path)
      if (on_path == g) return false;  // cycle
    path.push_back(g);
    int dmax = -1;
    for (Index j : deps[static_cast<std::size_t>(g)]) {
      if (!visit(j, path)) return false;
      dmax = std::max(dmax, depth[static_cast<std::size_t>(j)]);
    }
    path.pop_back();
    depth[static_cast<std::size_t>(g)] = dmax + 1;
    return true;
  };
  for (Index g = 0; g < ng; ++g) {
    std::vector<Index> path;
    if (!visit(g, path)) return std::nullopt;
  }
  Resolution<K> res;
  res.base = B;
  res.target = N;
  res.gen_space = gsp;
  res.pix = pix;
  res.gen_stage.assign(static_cast<std::size_t>(ng), 0);
  for (Index g = 0; g < ng; ++g) res.gen_stage[static_cast<std::size_t>(g)] = depth[static_cast<std::size_t>(g)];
  res.P = detail::free_module_on(B, gsp, pix, gen_d);
  if (!is_zero(MatX<K>(pairing * res.P.d - N.d * pairing))) return std::nullopt;
  res.eps = pairing;
  res.complete = true;
  res.mode = Resolution<K>::Mode::CompleteOnly;
  return res;
}

// Builds a semifree resolution of N whose construction is final on `need`
// (P and the quasi-isomorphism can no longer change there), or throws.
template <class K>
Resolution<K> semifree_resolution(const DGModule<K>& N, int stage_cap, Window need) {
  if (N.side != Side::Right)
    throw std::invalid_argument("semifree_resolution: right modules only");
  if (auto fast = already_semifree(N)) return *fast;
  AlgebraPtr<K> B = N.over;
  Resolution<K> res;
  res.base = B;
  res.target = N;
  const bool nonpos = B->space.total_dim() == 0 || B->space.max_degree() <= 0;
  const bool nonneg_conn = B->space.min_degree() >= 0 && B->space.dim(0) == 1;
  res.mode = nonpos ? Resolution<K>::Mode::Nonpositive
                    : (nonneg_conn ? Resolution<K>::Mode::NonnegConnected
                                   : Resolution<K>::Mode::CompleteOnly);

  std::vector<int> gen_degs;
  std::vector<VecX<K>> gen_d_cols;  // in P coords (of the previous P!)
  std::vector<VecX<K>> gen_eps;     // in N coords

  auto rebuild = [&](Resolution<K>& r) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < gen_degs.size(); ++i) labels.push_back("g" + std::to_string(i));
    r.gen_space = GradedSpace(labels, gen_degs);
    r.pix = TensorIndexer(r.gen_space, B->space, "·");
    const Index ng = static_cast<Index>(gen_degs.size());
    // gen_d_cols live on append-order "raw" pair slots; gen_space re-sorts by
    // degree as generators arrive, so translate through the labels
    auto sorted_of_append = [&r](Index append_idx) {
      return *r.gen_space.find("g" + std::to_string(append_idx));
    };
    MatX<K> gen_d = MatX<K>::Zero(ng * B->dim(), ng);
    for (Index g = 0; g < ng; ++g) {
      const VecX<K>& raw = gen_d_cols[static_cast<std::size_t>(g)];
      for (Index slot = 0; slot < raw.size(); ++slot) {
        if (raw(slot).is_zero()) continue;
        Index gi = slot / B->dim(), ai = slot % B->dim();
        gen_d(r.pix.index(sorted_of_append(gi), ai), sorted_of_append(g)) += raw(slot);
      }
    }
    r.P = detail::free_module_on(B, r.gen_space, r.pix, gen_d);
    r.eps = MatX<K>::Zero(N.dim(), r.P.dim());
    for (Index g = 0; g < ng; ++g)
      for (Index a = 0; a < B->dim(); ++a) {
        // eps(g·a) = eps(g)·a
        VecX<K> base_img = gen_eps[static_cast<std::size_t>(g)];
        r.eps.col(r.pix.index(sorted_of_append(g), a)) +=
            N.apply(B->basis_vec(a), base_img);
      }
    r.gen_stage.assign(gen_degs.size(), 0);
  };

  std::vector<int> stages;
  for (int stage = 0; stage <= stage_cap; ++stage) {
    rebuild(res);
    for (std::size_t i = 0; i < stages.size(); ++i) {
      Index sorted = *res.gen_space.find("g" + std::to_string(i));
      res.gen_stage[static_cast<std::size_t>(sorted)] = stages[i];
    }
    // cone complex: P[1] ⊕ N
    const Index np = res.P.dim(), nn = N.dim(), nc = np + nn;
    std::vector<std::string> clabels;
    std::vector<int> cdegs;
    for (Index i = 0; i < np; ++i) {
      clabels.push_back("p" + std::to_string(i));
      cdegs.push_back(res.P.space.degree_of(i) - 1);
    }
    for (Index i = 0; i < nn; ++i) {
      clabels.push_back("n" + std::to_string(i));
      cdegs.push_back(N.space.degree_of(i));
    }
    GradedSpace csp(clabels, cdegs);
    std::vector<Index> to_new(static_cast<std::size_t>(nc));
    {
      std::vector<bool> used(static_cast<std::size_t>(nc), false);
      for (Index old = 0; old < nc; ++old)
        for (Index g2 = 0; g2 < nc; ++g2) {
          if (used[static_cast<std::size_t>(g2)] || csp.label(g2) != clabels[static_cast<std::size_t>(old)]) continue;
          to_new[static_cast<std::size_t>(old)] = g2;
          used[static_cast<std::size_t>(g2)] = true;
          break;
        }
    }
    MatX<K> dc = MatX<K>::Zero(nc, nc);
    for (Index j = 0; j < np; ++j) {
      for (Index i = 0; i < np; ++i)
        if (!res.P.d(i, j).is_zero())
          dc(to_new[static_cast<std::size_t>(i)], to_new[static_cast<std::size_t>(j)]) -= res.P.d(i, j);
      for (Index i = 0; i < nn; ++i)
        if (!res.eps(i, j).is_zero())
          dc(to_new[static_cast<std::size_t>(np + i)], to_new[static_cast<std::size_t>(j)]) += res.eps(i, j);
    }
    for (Index j = 0; j < nn; ++j)
      for (Index i = 0; i < nn; ++i)
        if (!N.d(i, j).is_zero())
          dc(to_new[static_cast<std::size_t>(np + i)], to_new[static_cast<std::size_t>(np + j)]) += N.d(i, j);
    Complex<K> cone{csp, dc, Window::all()};
    auto H = complex_cohomology(cone, Window::at(csp.min_degree() - 1, csp.max_degree() + 1));
#ifdef DGDEFORM_RES_DEBUG
    std::cerr << "stage " << stage << " cone H:";
    for (auto& h : H)
      if (h.dim) std::cerr << " [" << h.degree << "]=" << h.dim;
    std::cerr << "\n";
#endif

    int lo_nz = 0, hi_nz = 0;
    bool any = false;
    for (auto& h : H)
      if (h.dim > 0) {
        if (!any) lo_nz = h.degree;
        hi_nz = h.degree;
        any = true;
      }
    if (!any) {
      res.complete = true;
      res.frontier.reset();
      return res;
    }
    res.frontier = (res.mode == Resolution<K>::Mode::Nonpositive) ? hi_nz : lo_nz;
    if (res.mode == Resolution<K>::Mode::NonnegConnected && lo_nz > need.hi) return res;
    if (res.mode == Resolution<K>::Mode::Nonpositive && hi_nz < need.lo) return res;
    if (stage == stage_cap) break;

    // kill the full class basis at the moving frontier degree
    int t = (res.mode == Resolution<K>::Mode::Nonpositive) ? hi_nz : lo_nz;
    if (res.mode == Resolution<K>::Mode::CompleteOnly) t = lo_nz;
    for (auto& h : H) {
      if (h.degree != t || h.dim == 0) continue;
      MatX<K> inj = csp.template slice_injection<K>(t);
      for (Index c = 0; c < h.reps.cols(); ++c) {
        VecX<K> rep = inj * h.reps.col(c);  // cone coordinates
        // split into P[1] and N parts (old coordinate order via to_new)
        VecX<K> p_part = VecX<K>::Zero(np), n_part = VecX<K>::Zero(nn);
        for (Index i = 0; i < np; ++i) p_part(i) = rep(to_new[static_cast<std::size_t>(i)]);
        for (Index i = 0; i < nn; ++i) n_part(i) = rep(to_new[static_cast<std::size_t>(np + i)]);
        // new generator of degree t: d(gen) = -p_part, eps(gen) = n_part,
        // recorded on unsorted pair slots (gen-major layout)
        VecX<K> raw = VecX<K>::Zero(static_cast<Index>(gen_degs.size() + 1) * B->dim());
        for (Index slot = 0; slot < np; ++slot) {
          if (p_part(slot).is_zero()) continue;
          auto [gi, ai] = res.pix.split(slot);
          Index gi_append = std::stoll(res.gen_space.label(gi).substr(1));
          raw(gi_append * B->dim() + ai) = -p_part(slot);
        }
        gen_degs.push_back(t);
        gen_d_cols.push_back(std::move(raw));
        gen_eps.push_back(n_part);
        stages.push_back(stage);
      }
    }
  }
  std::vector<int> unstable;
  if (res.frontier) unstable.push_back(*res.frontier);
  throw ResolutionError("semifree_resolution: stage cap " + std::to_string(stage_cap) +
                            " reached before the window stabilized",
                        unstable);
}

// H(cone) = 0 over the window: the quasi-isomorphism certificate the spec's
// invariants ask for (recomputed from the returned data).
template <class K>
bool resolution_quasi_iso_on(const Resolution<K>& res, Window w) {
  const Index np = res.P.dim(), nn = res.target.dim();
  std::vector<std::string> clabels;
  std::vector<int> cdegs;
  for (Index i = 0; i < np; ++i) {
    clabels.push_back("p" + std::to_string(i));
    cdegs.push_back(res.P.space.degree_of(i) - 1);
  }
  for (Index i = 0; i < nn; ++i) {
    clabels.push_back("n" + std::to_string(i));
    cdegs.push_back(res.target.space.degree_of(i));
  }
  GradedSpace csp(clabels, cdegs);
  std::vector<Index> to_new(static_cast<std::size_t>(np + nn));
  std::vector<bool> used(static_cast<std::size_t>(np + nn), false);
  for (Index old = 0; old < np + nn; ++old)
    for (Index g2 = 0; g2 < np + nn; ++g2) {
      if (used[static_cast<std::size_t>(g2)] || csp.label(g2) != clabels[static_cast<std::size_t>(old)]) continue;
      to_new[static_cast<std::size_t>(old)] = g2;
      used[static_cast<std::size_t>(g2)] = true;
      break;
    }
  MatX<K> dc = MatX<K>::Zero(np + nn, np + nn);
  for (Index j = 0; j < np; ++j) {
    for (Index i = 0; i < np; ++i)
      if (!res.P.d(i, j).is_zero()) dc(to_new[static_cast<std::size_t>(i)], to_new[static_cast<std::size_t>(j)]) -= res.P.d(i, j);
    for (Index i = 0; i < nn; ++i)
      if (!res.eps(i, j).is_zero()) dc(to_new[static_cast<std::size_t>(np + i)], to_new[static_cast<std::size_t>(j)]) += res.eps(i, j);
  }
  for (Index j = 0; j < nn; ++j)
    for (Index i = 0; i < nn; ++i)
      if (!res.target.d(i, j).is_zero())
        dc(to_new[static_cast<std::size_t>(np + i)], to_new[static_cast<std::size_t>(np + j)]) += res.target.d(i, j);
  Complex<K> cone{csp, dc, Window::all()};
  for (auto& h : complex_cohomology(cone, w))
    if (h.dim != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Ext

template <class K>
struct ExtResult {
  Window window;
  std::vector<Index> dims;             // one per degree in window
  std::vector<MatX<K>> reps;           // cocycle maps P -> N per class, flattened by degree
  std::vector<int> rep_degrees;
  Resolution<K> resolution;
  HomComplex<K> hom;
};

template <class K>
ExtResult<K> ext_over(const DGModule<K>& M, const DGModule<K>& N, Window window, int stage_cap) {
  // P must be final wherever Hom(P,N) in window±1 looks
  Window need = N.dim() ? Window::at(N.space.min_degree() - window.hi - 1,
                                     N.space.max_degree() - window.lo + 1)
                        : Window::at(0, 0);
  Resolution<K> res = semifree_resolution(M, stage_cap, need);
  if (!res.window_final(need))
    throw ResolutionError("ext_over: window not certifiable at this stage cap", {});
  ExtResult<K> out{window, {}, {}, {}, std::move(res), {}};
  out.hom = hom_complex(out.resolution.P, N, "x");
  Complex<K> c = out.hom.as_complex();
  auto H = complex_cohomology(c, window);
  for (auto& h : H) {
    out.dims.push_back(h.dim);
    MatX<K> inj = c.space.template slice_injection<K>(h.degree);
    for (Index j = 0; j < h.reps.cols(); ++j) {
      out.reps.push_back(out.hom.realize(VecX<K>(inj * h.reps.col(j))));
      out.rep_degrees.push_back(h.degree);
    }
  }
  return out;
}

// Composition products on Ext(k,k): lift each representative f: P -> k to
// f̂: P -> P with eps∘f̂ = f and d f̂ = (-1)^{|f|} f̂ d, then multiply classes
// as [f]·[g] = [f ∘ ĝ]. Solvable whenever the certified window contains the
// degrees involved.
template <class K>
struct ExtProductTable {
  std::vector<int> degrees;        // degree of each class
  std::vector<MatX<K>> table;      // table[i*n+j] = coords of [rep_i ∘ lift(rep_j)]
};

template <class K>
std::optional<MatX<K>> lift_through_resolution(const Resolution<K>& res, const HomComplex<K>& endP,
                                               const MatX<K>& f, int deg) {
  // unknown F = Σ x_b e_b over the degree-deg module endomorphisms of P, with
  // eps∘F = f and dF = 0 in the Hom complex
  std::vector<Index> idx;
  for (Index b = 0; b < endP.space.total_dim(); ++b)
    if (endP.space.degree_of(b) == deg) idx.push_back(b);
  const Index u = static_cast<Index>(idx.size());
  const Index np = res.P.dim(), nn = res.eps.rows();
  std::vector<Eigen::Matrix<K, 1, Eigen::Dynamic>> rows;
  std::vector<K> rhs;
  for (Index j = 0; j < np; ++j)
    for (Index r = 0; r < nn; ++r) {
      Eigen::Matrix<K, 1, Eigen::Dynamic> row = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
      bool nz = false;
      for (Index t = 0; t < u; ++t) {
        row(t) = (res.eps * endP.basis[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])])(r, j);
        if (!row(t).is_zero()) nz = true;
      }
      if (nz || !f(r, j).is_zero()) {
        rows.push_back(std::move(row));
        rhs.push_back(f(r, j));
      }
    }
  for (Index drow = 0; drow < endP.space.total_dim(); ++drow) {
    Eigen::Matrix<K, 1, Eigen::Dynamic> row = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
    bool nz = false;
    for (Index t = 0; t < u; ++t) {
      row(t) = endP.d(drow, idx[static_cast<std::size_t>(t)]);
      if (!row(t).is_zero()) nz = true;
    }
    if (nz) {
      rows.push_back(std::move(row));
      rhs.push_back(K(0));
    }
  }
  MatX<K> A = MatX<K>::Zero(static_cast<Index>(rows.size()), u);
  VecX<K> b = VecX<K>::Zero(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(static_cast<Index>(r)) = rows[r];
    b(static_cast<Index>(r)) = rhs[r];
  }
  auto x = solve<K>(A, b);
  if (!x) return std::nullopt;
  MatX<K> F = MatX<K>::Zero(np, np);
  for (Index t = 0; t < u; ++t) F += (*x)(t) * endP.basis[static_cast<std::size_t>(idx[static_cast<std::size_t>(t)])];
  return F;
}

// ---------------------------------------------------------------------------
// Tor against k over the coefficient algebra

template <class K>
struct TorResult {
  Window window;
  std::vector<Index> dims;
  std::string route;  // which certification route fired
};

// View a right (A⊗R)-module as a right R-module.
template <class K>
DGModule<K> restrict_to_R(const TensorContext<K>& ctx, const DGModule<K>& M) {
  DGModule<K> out;
  out.name = M.name + "|R";
  out.over = ctx.R;
  out.side = Side::Right;
  out.space = M.space;
  out.d = M.d;
  const Index n = M.dim();
  out.act = MatX<K>::Zero(ctx.R->dim() * n, n);
  for (Index r = 0; r < ctx.R->dim(); ++r) {
    MatX<K> op = M.action_operator(ctx.embed_R(ctx.R->basis_vec(r)));
    for (Index j = 0; j < n; ++j) out.act.row(r * n + j) = op.col(j).transpose();
  }
  return out;
}

// chain-level trivialization M ≅ (i*M)⊗R as R-modules, if one exists
template <class K>
std::optional<Complex<K>> trivial_extension_fiber(const DGModule<K>& Mr) {
  const auto& R = *Mr.over;
  // fiber K = M/(M·m) with induced differential
  std::vector<VecX<K>> gens;
  for (Index rj = 0; rj < R.dim(); ++rj) {
    if (rj == R.unit) continue;
    for (Index m = 0; m < Mr.dim(); ++m) {
      VecX<K> v = Mr.basis_act(rj, m);
      if (!is_zero(v)) gens.push_back(std::move(v));
    }
  }
  MatX<K> sub(Mr.dim(), static_cast<Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) sub.col(static_cast<Index>(i)) = gens[i];
  sub = column_space<K>(sub);
  auto q = quotient_module(Mr, sub, "fiber");
  // wanted: degree-0 s with proj∘s = id and d∘s = s∘d_K; unknowns over slots
  const Index nk = q.module.dim(), nm = Mr.dim();
  std::vector<std::pair<Index, Index>> slots;
  for (Index j = 0; j < nk; ++j)
    for (Index i = 0; i < nm; ++i)
      if (Mr.space.degree_of(i) == q.module.space.degree_of(j)) slots.emplace_back(i, j);
  const Index u = static_cast<Index>(slots.size());
  std::vector<Eigen::Matrix<K, 1, Eigen::Dynamic>> rows;
  std::vector<K> rhs;
  for (Index j = 0; j < nk; ++j)
    for (Index r = 0; r < nk; ++r) {
      Eigen::Matrix<K, 1, Eigen::Dynamic> row = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
      for (Index t = 0; t < u; ++t) {
        auto [mi, kj] = slots[static_cast<std::size_t>(t)];
        if (kj == j) row(t) = q.proj(r, mi);
      }
      rows.push_back(row);
      rhs.push_back(r == j ? scalar_from_int<K>(1, Mr.over->field) : K(0));
    }
  for (Index j = 0; j < nk; ++j)
    for (Index i = 0; i < nm; ++i) {
      Eigen::Matrix<K, 1, Eigen::Dynamic> row = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
      bool nz = false;
      for (Index t = 0; t < u; ++t) {
        auto [mi, kj] = slots[static_cast<std::size_t>(t)];
        K c(0);
        if (kj == j) c += Mr.d(i, mi);
        if (mi == i) c -= q.module.d(kj, j);
        if (!c.is_zero()) nz = true;
        row(t) = c;
      }
      if (nz) {
        rows.push_back(row);
        rhs.push_back(K(0));
      }
    }
  MatX<K> A = MatX<K>::Zero(static_cast<Index>(rows.size()), u);
  VecX<K> b = VecX<K>::Zero(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(static_cast<Index>(r)) = rows[r];
    b(static_cast<Index>(r)) = rhs[r];
  }
  auto x = solve<K>(A, b);
  if (!x) return std::nullopt;
  MatX<K> s = MatX<K>::Zero(nm, nk);
  for (Index t = 0; t < u; ++t) s(slots[static_cast<std::size_t>(t)].first, slots[static_cast<std::size_t>(t)].second) = (*x)(t);
  // freeness witness: pairing (lift basis)·R must span M
  MatX<K> phi(nm, nk * R.dim());
  for (Index j = 0; j < nk; ++j)
    for (Index r = 0; r < R.dim(); ++r)
      phi.col(j * R.dim() + r) = Mr.apply(R.basis_vec(r), VecX<K>(s.col(j)));
  if (rank<K>(phi) != nm || nm != nk * R.dim()) return std::nullopt;
  return q.module.as_complex();
}

template <class K>
TorResult<K> tor_with_k(const TensorContext<K>& ctx, const DGModule<K>& M, Window window,
                        int stage_cap) {
  DGModule<K> Mr = restrict_to_R(ctx, M);
  TorResult<K> out{window, {}, ""};
  // route 1: acyclic module -> zero object in the derived category
  {
    Window full(Window::at(M.space.min_degree() - 1, M.space.max_degree() + 1));
    bool acy = true;
    for (auto& h : complex_cohomology(M.as_complex(), full))
      if (h.dim != 0) acy = false;
    if (acy) {
      out.route = "acyclic";
      for (int n = window.lo; n <= window.hi; ++n) out.dims.push_back(0);
      return out;
    }
  }
  // route 2: chain-level trivialization M ≅ (i*M)⊗R
  if (auto fib = trivial_extension_fiber(Mr)) {
    out.route = "graded-free-trivialization";
    for (int n = window.lo; n <= window.hi; ++n) {
      auto h = cohomology_slice<K>(fib->d_block(n - 1), fib->d_block(n));
      out.dims.push_back(h.dim);
    }
    return out;
  }
  // route 3: resolve over R and read H(P ⊗_R k) = H(generators with induced d)
  Window need = Window::at(window.lo - 1, window.hi + 1);
  Resolution<K> res = semifree_resolution(Mr, stage_cap, need);
  if (!res.window_final(need))
    throw ResolutionError("tor_with_k: window not certifiable at this stage cap", {});
  out.route = "resolution";
  // i*P: generator space with d = generator differential mod m
  const Index ng = res.gen_space.total_dim();
  MatX<K> dk = MatX<K>::Zero(ng, ng);
  for (Index g = 0; g < ng; ++g) {
    // d(gen g) in P coords; keep only (gen', unit) components
    VecX<K> dg = res.P.d * res.P.basis_vec(res.pix.index(g, ctx.R->unit));
    for (Index p = 0; p < res.P.dim(); ++p) {
      if (dg(p).is_zero()) continue;
      auto [g2, a2] = res.pix.split(p);
      if (a2 == ctx.R->unit) dk(g2, g) += dg(p);
      // components with a2 in m die in P⊗k
    }
  }
  Complex<K> fiber{res.gen_space, dk, Window::all()};
  for (int n = window.lo; n <= window.hi; ++n) {
    auto h = cohomology_slice<K>(fiber.d_block(n - 1), fiber.d_block(n));
    out.dims.push_back(h.dim);
  }
  return out;
}

}  // namespace dgdeform
