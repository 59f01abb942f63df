"""Local cohomology, local homology, Cech cohomology, and the
Grothendieck-duality oracle.

Tables are cohomologically indexed: ``H^i`` is stored with ``i >= 0`` and
corresponds to homological block ``s = -i`` of the torsion functor's model,
so an entry ``(i, t)`` contributes to total homotopy degree ``n = t - i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exactla import ContractViolation, SparseMatrix, rank, solve_matrix
from .graded import (ExtField, GradedModule, GradedRing, HomIdeal, Window,
                     _eval_poly, _sample_point, hilbert_function,
                     minimal_free_resolution)
from .complexes import (WindowedComplex, direct_sum, homology, homology_space,
                        module_complex, shift)
from .torsion import (SpecSubset, complex_element_action, default_s_max,
                      gamma, completion, localize_away, _ideal_data)

import random

Entry = Tuple[int, int]  # (cohomological index i, internal degree t)


@dataclass
class CohomologyTable:
    """Map (i, t) -> dimension with per-entry flags and provenance."""

    entries: Dict[Entry, int]
    flags: Dict[Entry, str] = field(default_factory=dict)
    provenance: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if v}
        for (i, _t) in self.entries:
            if i < 0:
                raise ContractViolation("cohomological index must be >= 0")
        bound = self.provenance.get("koszul_bound")
        if bound is not None:
            for (i, _t) in self.entries:
                if i > bound:
                    raise ContractViolation(
                        f"H^{i} nonzero beyond the Koszul bound {bound}")

    def dim(self, i: int, t: int) -> int:
        return self.entries.get((i, t), 0)

    def totalize(self, n_lo: int, n_hi: int) -> Dict[int, int]:
        """Totals per homotopy degree n = t - i."""
        out: Dict[int, int] = {}
        for (i, t), v in self.entries.items():
            n = t - i
            if n_lo <= n <= n_hi:
                out[n] = out.get(n, 0) + v
        return out

    def max_index(self) -> int:
        return max((i for (i, _t) in self.entries), default=0)

    def to_rows(self) -> List[Dict[str, object]]:
        rows = []
        for (i, t) in sorted(set(self.entries) | set(self.flags)):
            rows.append({"i": i, "t": t, "dim": self.entries.get((i, t), 0),
                         "flag": self.flags.get((i, t), "stable")})
        return rows


def local_cohomology(mod: GradedModule, p: HomIdeal, w: Window,
                     s_max: Optional[int] = None) -> CohomologyTable:
    """H^i_p(mod)_t via the stabilized torsion tower."""
    g = gamma(mod, SpecSubset.of_ideal(p), w, s_max)
    bound = len([q for q in p.gens if q])
    entries = {(-s, t): v for (s, t), v in g.homotopy.items()}
    flags = {(-s, t): "unstable" for (s, t) in g.flags}
    return CohomologyTable(entries, flags, {
        "functor": "local_cohomology", "ideal": p.name,
        "stage": g.provenance.get("stage"), "koszul_bound": bound})


def local_homology(mod: GradedModule, p: HomIdeal, w: Window,
                   s_max: Optional[int] = None) -> CohomologyTable:
    """H^p_s(mod)_t via the stabilized completion tower (s stored as i)."""
    lam = completion(mod, SpecSubset.of_ideal(p), w, s_max)
    bound = len([q for q in p.gens if q])
    entries = {(s, t): v for (s, t), v in lam.homotopy.items() if s >= 0}
    flags = {(s, t): "unstable" for (s, t) in lam.flags if s >= 0}
    return CohomologyTable(entries, flags, {
        "functor": "local_homology", "ideal": p.name,
        "stage": lam.provenance.get("stage"), "koszul_bound": bound})


def cech_cohomology(mod: GradedModule, p: HomIdeal, w: Window,
                    s_max: Optional[int] = None) -> CohomologyTable:
    """Cech cohomology of the module from the torsion long exact sequence.

    0 -> H^0_p -> M -> CH^0 -> H^1_p -> 0 and CH^i = H^{i+1}_p for i >= 1.
    """
    lc = local_cohomology(mod, p, w, s_max)
    hf = hilbert_function(mod, w)
    entries: Dict[Entry, int] = {}
    flags: Dict[Entry, str] = {}
    for t in w.t_range():
        d = hf.get(t, 0) - lc.dim(0, t) + lc.dim(1, t)
        if d:
            entries[(0, t)] = d
        for key in ((0, t), (1, t)):
            if key in lc.flags:
                flags[(0, t)] = "unstable"
    for (i, t), v in lc.entries.items():
        if i >= 2:
            entries[(i - 1, t)] = v
    for (i, t), f in lc.flags.items():
        if i >= 2:
            flags[(i - 1, t)] = f
    bound = max(0, len([q for q in p.gens if q]) - 1)
    return CohomologyTable(entries, flags, {
        "functor": "cech_cohomology", "ideal": p.name,
        "koszul_bound": max(bound, lc.max_index())})


def cech_les_balance(mod: GradedModule, p: HomIdeal, w: Window) -> bool:
    """Alternating-sum identity of M, H^*_p, CH^* in every internal degree."""
    lc = local_cohomology(mod, p, w)
    ch = cech_cohomology(mod, p, w)
    hf = hilbert_function(mod, w)
    flagged_t = {t for (_i, t) in list(lc.flags) + list(ch.flags)}
    for t in w.t_range():
        if t in flagged_t:
            continue
        euler_h = sum(((-1) ** i) * v for (i, tt), v in lc.entries.items()
                      if tt == t)
        euler_c = sum(((-1) ** i) * v for (i, tt), v in ch.entries.items()
                      if tt == t)
        # LES Gamma -> id -> L: chi(CH) = chi(M) - chi(H) with
        # cohomological signs: CH^0 - CH^1 + ... = M - (H^0 - H^1 + ...)
        if euler_c != hf.get(t, 0) - euler_h:
            return False
    return True


Formal = Union[GradedModule, Sequence[Tuple[GradedModule, int]]]


def _parts(m: Formal) -> List[Tuple[GradedModule, int]]:
    if isinstance(m, GradedModule):
        return [(m, 0)]
    return [(mod, sh) for (mod, sh) in m]


def collapse_check(m: Formal, p: HomIdeal, w: Window,
                   s_max: Optional[int] = None) -> Dict[str, object]:
    """Collapse identity for formal inputs.

    For m a direct sum of shifted modules, verifies
    dim pi_n(Gamma_V(p) m) = sum_i dim (H^i_p(pi_* m))_{n+i} at every
    interior n.  Both pipelines are run independently: the left side
    applies the torsion functor to the assembled complex, the right side
    computes module-level local cohomology summand by summand.
    """
    parts = _parts(m)
    ring = parts[0][0].ring
    v = SpecSubset.of_ideal(p)
    s_max = s_max or default_s_max(w)
    _, tw = _ideal_data(v.normalized_ideal)
    c = len([q for q in p.gens if q])
    floor = w.t_lo - s_max * tw - 1

    pieces = []
    for mod, sh in parts:
        piece = module_complex(mod, Window(min(floor, mod.top_degree),
                                           max(w.t_hi, mod.top_degree)))
        pieces.append(shift(piece, sh))
    X = pieces[0]
    for piece in pieces[1:]:
        X = direct_sum(X, piece)

    g = gamma(X, v, w, s_max)
    left = {}
    for (s, t), val in g.homotopy.items():
        n = s + t
        left[n] = left.get(n, 0) + val

    right: Dict[int, int] = {}
    flagged_n = {s + t for (s, t) in g.flags}
    lo = w.t_lo
    hi = w.t_hi
    for mod, sh in parts:
        lc = local_cohomology(mod, p, w, s_max)
        for (i, t), val in lc.entries.items():
            n = (t + sh) - i
            right[n] = right.get(n, 0) + val
        flagged_n |= {(t + sh) - i for (i, t) in lc.flags}
        lo = max(lo, w.t_lo + sh)
        hi = min(hi, w.t_hi + sh - c)
    interior = [n for n in range(lo, hi + 1) if n not in flagged_n]
    mism = [n for n in interior if left.get(n, 0) != right.get(n, 0)]
    return {"verdict": not mism, "interior": (lo, hi),
            "mismatches": mism,
            "left": {n: left.get(n, 0) for n in interior if left.get(n, 0)},
            "right": {n: right.get(n, 0) for n in interior if right.get(n, 0)}}


def torsionness_check(mod: GradedModule, p: HomIdeal, w: Window,
                      s_max: Optional[int] = None) -> Dict[str, object]:
    """Every local-cohomology class is killed by a power of p.

    Follows each ideal generator's induced action on the homology of the
    torsion model down the window; classes whose orbit stays inside the
    window must die before leaving it.  Classes without enough window room
    are reported as unchecked rather than asserted.
    """
    v = SpecSubset.of_ideal(p)
    g = gamma(mod, v, w, s_max)
    model = g.model
    ring = mod.ring
    fld = ring.field
    checked = 0
    unchecked = 0
    failures: List[Tuple[int, int, str]] = []

    def induced(q, s, t, dq):
        K1, P1 = homology_space(model, s, t)
        K2, P2 = homology_space(model, s, t + dq)
        if P1.rows == 0 or P2.rows == 0:
            return SparseMatrix(fld, P2.rows, P1.rows)
        mat = complex_element_action(model, q, s, t, ring)
        x = solve_matrix(K2, mat @ K1)
        if x is None:
            raise ContractViolation("action does not preserve cycles")
        sec = solve_matrix(P1, SparseMatrix.identity(fld, P1.rows))
        return P2 @ x @ sec

    for q in p.gens:
        if not q:
            continue
        dq = ring.poly_degree(q)
        qname = ring.poly_str(q)
        for (s, t), val in g.homotopy.items():
            if (s, t) in g.flags or not val:
                continue
            comp = None
            tt = t
            dead = False
            while tt + dq >= w.t_lo:
                step = induced(q, s, tt, dq)
                comp = step if comp is None else step @ comp
                tt += dq
                if not comp.entries:
                    dead = True
                    break
            if dead:
                checked += 1
            elif tt + dq < w.t_lo:
                unchecked += 1
            else:
                failures.append((s, t, qname))
    return {"verdict": not failures, "checked": checked,
            "unchecked": unchecked, "failures": failures}


def grothendieck_vanishing(table: CohomologyTable,
                           krull_dim: int) -> bool:
    """H^i = 0 for i above the Krull dimension (unflagged entries)."""
    return all(i <= krull_dim or (i, t) in table.flags
               for (i, t) in table.entries)


def grothendieck_oracle(mod: GradedModule, w: Window,
                        certificate=None) -> CohomologyTable:
    """Independent oracle: H^i_m(mod) as the shifted dual of Ext.

    Over a certified Gorenstein ring with Krull dimension n and shift nu,
    classical graded local duality gives
    H^i_m(M)_t = Ext^{n-i}(M, R)_{nu + n - t}, which only needs finite-rank
    free resolutions and is exact in the window.
    """
    ring = mod.ring
    if certificate is None:
        from .duality import gorenstein_certificate
        certificate = gorenstein_certificate(ring, w)
    if not certificate.verdict:
        raise ContractViolation(
            f"ring {ring.name} is not certified Gorenstein; no Ext oracle")
    n = certificate.krull_dim
    nu = certificate.shift
    from .graded import ext as graded_ext
    Rmod = GradedModule.free_module(ring, [0], name=ring.name)
    tlo = nu + n - w.t_hi
    thi = nu + n - w.t_lo
    table = graded_ext(mod, Rmod, Window(tlo, thi, 0, max(n, 0)))
    entries: Dict[Entry, int] = {}
    for (j, tt), val in table.items():
        i = n - j
        t = nu + n - tt
        if 0 <= i and w.t_lo <= t <= w.t_hi:
            entries[(i, t)] = val
    return CohomologyTable(entries, {}, {
        "functor": "grothendieck_oracle", "gorenstein_shift": nu,
        "krull_dim": n, "koszul_bound": max(n, ring.n)})


def oracle_agreement(mod: GradedModule, w: Window,
                     certificate=None) -> Dict[str, object]:
    """Tower pipeline vs Ext-duality oracle at every stable bidegree."""
    ring = mod.ring
    mx = HomIdeal(ring, [ring.gen_poly(i) for i in range(ring.n)],
                  is_prime_asserted=True, name="m")
    lc = local_cohomology(mod, mx, w)
    oracle = grothendieck_oracle(mod, w, certificate)
    keys = {k for k in set(lc.entries) | set(oracle.entries)
            if w.t_lo <= k[1] <= w.t_hi and k not in lc.flags}
    mism = {k: (lc.dim(*k), oracle.dim(*k)) for k in keys
            if lc.dim(*k) != oracle.dim(*k)}
    return {"verdict": not mism, "mismatches": mism,
            "stable_entries": len(keys)}


def generic_ext_ranks(mod: GradedModule, p: HomIdeal, length: int,
                      w: Window, seed: int = 0,
                      trials: int = 5) -> Tuple[Dict[int, int], bool]:
    """kappa(p)-ranks of Ext^j(mod, R) at the generic point of V(p).

    Evaluates the polynomial differentials of a minimal free resolution at
    sampled points of the variety over field extensions and takes homology
    ranks over the extension field; majority vote per index.
    """
    ring = mod.ring
    res = minimal_free_resolution(mod, length + 1, w)
    warning = not p.is_prime_asserted
    votes: Dict[int, List[int]] = {j: [] for j in range(length + 1)}
    rng = random.Random(seed)
    for _ in range(max(trials, 5)):
        found = None
        for e in (2, 3, 4):
            extf = ExtField(ring.characteristic, e)
            pt = _sample_point(ring, p, extf, rng)
            if pt is not None:
                found = (extf, pt)
                break
        if found is None:
            warning = True
            continue
        extf, pt = found
        # Hom(F_., kappa(p)): transposed evaluated differentials
        mats = []
        for i, diff in enumerate(res.diffs):
            rows_n = res.stages[i + 1].rank
            cols_n = res.stages[i].rank
            rows = [[extf.zero()] * cols_n for _ in range(rows_n)]
            for (a, b), q in diff.items():
                rows[b][a] = _eval_poly(ring, extf, q, pt)
            mats.append(rows)
        ranks = [extf.rank(mt) if mt else 0 for mt in mats]
        for j in range(length + 1):
            if j >= len(res.stages):
                votes[j].append(0)
                continue
            dim_j = res.stages[j].rank
            r_out = ranks[j] if j < len(ranks) else 0
            r_in = ranks[j - 1] if j >= 1 else 0
            votes[j].append(dim_j - r_out - r_in)
    out: Dict[int, int] = {}
    for j, vs in votes.items():
        if not vs:
            warning = True
            continue
        best = max(set(vs), key=vs.count)
        if vs.count(best) <= len(vs) // 2:
            warning = True
        if best:
            out[j] = best
    return out, warning
