"""Injective hulls, Matlis/Brown-Comenetz duality of complexes, dual
localization, and Gorenstein certification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .exactla import ContractViolation, SparseMatrix, rank, solve_matrix
from .graded import (DegreewiseModel, GradedModule, GradedRing, HomIdeal,
                     Window, hilbert_function, matlis_dual, models_isomorphic)
from .complexes import (WindowedComplex, homology, homology_space,
                        module_complex, tensor, total_homology)
from .torsion import (SpecSubset, complex_element_action, default_s_max,
                      gamma, telescope_invert)
from .cohom import (CohomologyTable, generic_ext_ranks, local_cohomology)


# injective models -----------------------------------------------------------


@dataclass
class InjectiveModel:
    """Model of the injective hull I_p of the residue field at p."""

    prime: HomIdeal
    hilbert: Optional[Dict[int, int]] = None       # exact, at p = m
    model: Optional[DegreewiseModel] = None        # with actions, at p = m
    kappa_rank: Optional[int] = None               # at p != m
    route: str = "matlis"
    flags: List[str] = field(default_factory=list)

    def dim(self, t: int) -> int:
        return (self.hilbert or {}).get(t, 0)


def maximal_ideal(ring: GradedRing) -> HomIdeal:
    return HomIdeal(ring, [ring.gen_poly(i) for i in range(ring.n)],
                    is_prime_asserted=True, name="m")


def _is_maximal(p: HomIdeal) -> bool:
    return p.is_maximal() if hasattr(p, "is_maximal") else False


def injective_hull(p: HomIdeal, w: Window, seed: int = 0) -> InjectiveModel:
    """I_p: exact Matlis dual of the ring at the maximal ideal, kappa(p)-rank
    data through dual localization otherwise."""
    ring = p.ring
    if _is_maximal(p):
        model = matlis_dual(GradedModule.free_module(ring, [0]), w)
        return InjectiveModel(p, hilbert=dict(model.dims), model=model,
                              route="matlis")
    # L_p(I_m): D_m(I_m) = R, localize at p, re-dual; the rank at the
    # generic point of a ring is 1
    return InjectiveModel(p, kappa_rank=1, route="dual_localize",
                          flags=["probabilistic"])


def brown_comenetz(m: WindowedComplex, w: Window) -> WindowedComplex:
    """Degreewise k-linear dual complex with transposed differentials and
    actions; an involution on homology tables within the window."""
    ring = m.ring
    dims = {(-s, -t): d for (s, t), d in m.dims.items()
            if w.t_lo <= -t <= w.t_hi}
    diffs = {}
    for (s, t) in dims:
        d = m.diff(-s + 1, -t)
        if d.entries:
            diffs[(s, t)] = d.transpose()
    actions = {}
    for gi, g in enumerate(ring.generators):
        for (s, t) in dims:
            src = (-s, -t - g.degree)
            if m.dims.get(src):
                act = m.action(gi, -s, -t - g.degree)
                if act.entries:
                    actions[(gi, s, t)] = act.transpose()
    dual_w = Window(w.t_lo, w.t_hi)
    s_vals = [s for (s, _t) in dims] or [0]
    return WindowedComplex(ring, dims, diffs, actions,
                           min(s_vals), max(s_vals),
                           -m.window.t_lo, dual_w)


# reconstructing module structure on homology --------------------------------


def homology_model(model: WindowedComplex, s: int, w: Window) -> DegreewiseModel:
    """Generator actions induced on the homology of one homological block."""
    ring = model.ring
    fld = ring.field
    dims: Dict[int, int] = {}
    spaces = {}
    for t in w.t_range():
        K, P = homology_space(model, s, t)
        spaces[t] = (K, P)
        if P.rows:
            dims[t] = P.rows
    actions: Dict[Tuple[int, int], SparseMatrix] = {}
    for gi, g in enumerate(ring.generators):
        q = ring.gen_poly(gi)
        for t in w.t_range():
            t2 = t + g.degree
            if t2 < w.t_lo or t2 > w.t_hi:
                continue
            K1, P1 = spaces[t]
            K2, P2 = spaces[t2]
            if P1.rows == 0 or P2.rows == 0:
                continue
            mat = complex_element_action(model, q, s, t, ring)
            x = solve_matrix(K2, mat @ K1)
            if x is None:
                raise ContractViolation("action does not preserve cycles")
            sec = solve_matrix(P1, SparseMatrix.identity(fld, P1.rows))
            actions[(gi, t)] = P2 @ x @ sec
    return DegreewiseModel(ring, dims, actions)


def shift_model(model: DegreewiseModel, k: int) -> DegreewiseModel:
    """Internal-degree shift: the shifted model has degree t piece equal to
    the input's degree t - k piece."""
    dims = {t + k: d for t, d in model.dims.items()}
    actions = {(gi, t + k): mat for (gi, t), mat in model.actions.items()}
    return DegreewiseModel(model.ring, dims, actions)


# Gorenstein certification ----------------------------------------------------


@dataclass
class GorensteinCertificate:
    ring_name: str
    verdict: Optional[bool]            # None = inconclusive
    krull_dim: int
    shift: Optional[int] = None
    witness: Dict[str, object] = field(default_factory=dict)
    failure: Dict[str, object] = field(default_factory=dict)


def gorenstein_certificate(ring: GradedRing, w: Window,
                           seed: int = 0) -> GorensteinCertificate:
    """Algebraic Gorenstein test: H^*_m(R) concentrated in the Krull
    dimension n with H^n_m(R)_t matching (I_m)_{t - nu - n} for a unique
    offset nu, confirmed by an intertwiner solve on module structures."""
    n = ring.krull_dim()
    mx = maximal_ideal(ring)
    Rmod = GradedModule.free_module(ring, [0], name=ring.name)
    g = gamma(Rmod, SpecSubset.of_ideal(mx), w)
    lc_entries = {(-s, t): v for (s, t), v in g.homotopy.items()}
    lc_flags = {(-s, t) for (s, t) in g.flags}
    stray = {k: v for k, v in lc_entries.items()
             if k[0] != n and k not in lc_flags}
    if stray:
        return GorensteinCertificate(ring.name, False, n, None,
                                     failure={"nonvanishing": stray})
    hn = {t: v for (i, t), v in lc_entries.items() if i == n}
    hn_flagged = {t for (i, t) in lc_flags if i == n}
    im = injective_hull(mx, w)
    span = w.span

    def offset_matches(nu: int) -> bool:
        overlap = 0
        for t in w.t_range():
            if t in hn_flagged:
                continue
            src = t - nu - n
            if not (w.t_lo <= src <= w.t_hi):
                continue
            if hn.get(t, 0) != im.dim(src):
                return False
            overlap += hn.get(t, 0)
        return overlap > 0

    candidates = [nu for nu in range(-2 * span, 2 * span + 1)
                  if offset_matches(nu)]
    if not candidates:
        return GorensteinCertificate(
            ring.name, False, n, None,
            failure={"h_n": hn, "i_m": dict(im.hilbert or {}),
                     "reason": "no offset aligns the socle"})
    if len(candidates) > 1:
        return GorensteinCertificate(
            ring.name, None, n, None,
            failure={"reason": "ambiguous offset; widen the window",
                     "candidates": candidates})
    nu = candidates[0]
    hmodel = homology_model(g.model, -n, w)
    target = shift_model(im.model, nu + n)
    cmp_lo = max(w.t_lo, w.t_lo + nu + n)
    cmp_hi = min(w.t_hi, w.t_hi + nu + n)
    safe_hi = min(cmp_hi, min((t for t in hn_flagged), default=cmp_hi + 1) - 1)
    cw = Window(cmp_lo, max(cmp_lo, safe_hi))
    if not models_isomorphic(hmodel, target, cw, seed=seed):
        return GorensteinCertificate(
            ring.name, False, n, None,
            failure={"reason": "Hilbert functions align but no intertwiner",
                     "offset": nu})
    return GorensteinCertificate(
        ring.name, True, n, nu,
        witness={"h_n": hn, "i_m": dict(im.hilbert or {}),
                 "comparison_window": (cw.t_lo, cw.t_hi)})


# dual localization -----------------------------------------------------------


def dual_localize(x: Union[GradedModule, CohomologyTable], p: HomIdeal,
                  w: Window, seed: int = 0,
                  certificate: Optional[GorensteinCertificate] = None,
                  trials: int = 5) -> Dict[str, object]:
    """L_p = D_p . localize . D_m applied to m-torsion local cohomology.

    For a module M over a certified Gorenstein ring, D_m H^i_m(M) is
    identified with Ext^{n-i}(M, R) (finitely generated), the localization
    rank is read off at a generic point of V(p), and the final dual
    preserves kappa(p)-ranks.  Output ranks are keyed by the original
    cohomological index i; the transported table lives in index i - d.
    """
    if isinstance(x, CohomologyTable):
        if not x.entries:
            return {"ranks": {}, "dimension_drop": p.dim_of_quotient,
                    "flags": [], "seed": seed}
        raise ContractViolation(
            "dual_localize needs the underlying module for a nonzero table")
    mod = x
    ring = mod.ring
    if _is_maximal(p):
        lc = local_cohomology(mod, p, w)
        ranks = {}
        for (i, _t), v in lc.entries.items():
            ranks[i] = ranks.get(i, 0) + v
        return {"ranks": {i: 1 for i in ranks}, "table": lc,
                "dimension_drop": 0, "flags": [], "seed": seed,
                "identity": True}
    if certificate is None:
        certificate = gorenstein_certificate(ring, w)
    if not certificate.verdict:
        raise ContractViolation(
            "dual_localize needs a Gorenstein ring for the Ext route")
    n = certificate.krull_dim
    d = p.dim_of_quotient
    ext_ranks, warning = generic_ext_ranks(mod, p, n, w, seed=seed,
                                           trials=trials)
    ranks = {n - j: r for j, r in ext_ranks.items() if n - j >= 0}
    flags = ["probabilistic"] + (["warning"] if warning else [])
    return {"ranks": ranks, "dimension_drop": d, "flags": flags,
            "seed": seed}


# absolute Gorenstein / twists -------------------------------------------------


def absolute_gorenstein_check(ring: GradedRing, p: HomIdeal, w: Window,
                              seed: int = 0,
                              certificate: Optional[GorensteinCertificate]
                              = None) -> Dict[str, object]:
    """Gamma_p R against the (nu + d)-shifted injective model."""
    if certificate is None:
        certificate = gorenstein_certificate(ring, w, seed=seed)
    if not certificate.verdict:
        raise ContractViolation(
            f"ring {ring.name} is not certified Gorenstein")
    n = certificate.krull_dim
    nu = certificate.shift
    Rmod = GradedModule.free_module(ring, [0], name=ring.name)
    if _is_maximal(p):
        g = gamma(Rmod, SpecSubset.of_ideal(p), w)
        hmodel = homology_model(g.model, -n, w)
        im = injective_hull(p, w)
        target = shift_model(im.model, nu + n)
        cmp_lo = max(w.t_lo, w.t_lo + nu + n)
        flagged = {t for (s, t) in g.flags if s == -n}
        cmp_hi = min(w.t_hi,
                     min(flagged, default=w.t_hi + 1) - 1)
        cw = Window(cmp_lo, max(cmp_lo, cmp_hi))
        ok = models_isomorphic(hmodel, target, cw, seed=seed)
        return {"verdict": ok, "shift": nu, "dimension": 0,
                "mode": "exact", "comparison_window": (cw.t_lo, cw.t_hi)}
    d = p.dim_of_quotient
    loc = dual_localize(Rmod, p, w, seed=seed, certificate=certificate)
    ip = injective_hull(p, w)
    ok = loc["ranks"] == {n: ip.kappa_rank}
    return {"verdict": ok, "shift": nu, "dimension": d,
            "mode": "kappa(p)-rank", "ranks": loc["ranks"],
            "expected_index": n, "offset": nu + d,
            "flags": loc["flags"], "seed": seed}


def twist_check(ring: GradedRing, J: Optional[GradedModule], p: HomIdeal,
                w: Window, seed: int = 0,
                certificate: Optional[GorensteinCertificate] = None
                ) -> Dict[str, object]:
    """Gamma_p R tensor J against Sigma^d T_R(I_p) on total homology."""
    if not _is_maximal(p):
        raise ContractViolation("twist_check is exact only at the maximal "
                                "ideal; use absolute_gorenstein_check with "
                                "dual localization at other primes")
    Rmod = GradedModule.free_module(ring, [0], name=ring.name)
    g = gamma(Rmod, SpecSubset.of_ideal(p), w)
    c = ring.n
    im = injective_hull(p, w)
    if J is None or all(J.dim_in_degree(t) == 0 for t in
                        range(w.t_lo, w.t_hi + 1)):
        lhs_zero = True
        totals = {}
    else:
        j_top = J.top_degree
        floor_j = w.t_lo - max(0, g.model.t_top - w.t_lo) - 1
        Jc = module_complex(J, Window(floor_j, max(w.t_hi, j_top)))
        T = tensor(g.model, Jc)
        trusted_lo = w.t_lo + max(j_top, 0)
        totals = {}
        for (s, t), v in homology(T).items():
            nn = s + t
            if trusted_lo <= nn <= w.t_hi - c and w.t_lo <= t <= w.t_hi:
                totals[nn] = totals.get(nn, 0) + v
        lhs_zero = not totals
    lo = w.t_lo + max(J.top_degree if J is not None else 0, 0)
    hi = w.t_hi - c
    expected = {nn: im.dim(nn) for nn in range(lo, hi + 1) if im.dim(nn)}
    if lhs_zero:
        verdict = not expected
    else:
        verdict = all(totals.get(nn, 0) == expected.get(nn, 0)
                      for nn in range(lo, hi + 1))
    return {"verdict": verdict, "totals": totals, "expected": expected,
            "range": (lo, hi)}


# orthogonality ---------------------------------------------------------------


def _ideal_member(ring: GradedRing, p: HomIdeal, u) -> bool:
    gens = [g for g in p.gens if g]
    if not gens:
        return not ring.normal_form(u)
    q = ring.quotient(gens, name="_mem")
    return not q.normal_form(u)


def orthogonality_check(p: HomIdeal, q: HomIdeal, u, w: Window,
                        consec: int = 3) -> Dict[str, object]:
    """Kos(R; p) tensor Kos(R; q) is acyclic after inverting a witness
    element lying in one ideal but not the other."""
    ring = p.ring
    if isinstance(u, str):
        u = ring.parse(u)
    pg = sorted(ring.poly_str(g) for g in p.gens if g)
    qg = sorted(ring.poly_str(g) for g in q.gens if g)
    if pg == qg:
        raise ContractViolation("orthogonality needs two distinct primes")
    in_p = _ideal_member(ring, p, u)
    in_q = _ideal_member(ring, q, u)
    if in_p == in_q:
        raise ContractViolation(
            "witness element must lie in exactly one of the two ideals")
    from .torsion import koszul_free, free_tensor
    Fp = koszul_free(ring, [g for g in p.gens if g])
    Fq = koszul_free(ring, [g for g in q.gens if g])
    F = Fp.tensor(Fq)
    Rmod = GradedModule.free_module(ring, [0])
    span_room = sum(-ring.poly_degree(g) for g in list(p.gens) + list(q.gens)
                    if g)
    X = module_complex(Rmod, Window(w.t_lo - span_room - 1, w.t_hi))
    C, _ = free_tensor(F, X, t_floor=w.t_lo - span_room - 1)
    inv = telescope_invert(C, u, w, ring=ring, consec=consec)
    acyclic = not inv.homotopy and not inv.flags
    return {"verdict": acyclic, "flags": sorted(inv.flags),
            "residual": dict(inv.homotopy)}
