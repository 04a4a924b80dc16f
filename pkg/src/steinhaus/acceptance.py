"""The twelve acceptance criteria as runnable checks.

Each check returns a :class:`CriterionResult`; a criterion passes only when
its numeric condition holds and it finished within its time limit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .bounds import (half_hull_check, k1_family, kakeya_equivalence_check, one_d_constants,
                     shape_functionals, steiner_2d_check, steinhaus_radius_bruteforce,
                     theorem1_bound, verify_one_d_containment)
from .convex import is_symmetric, weighted_combination_set
from .metrics import (diameter_sq, hausdorff_points_polygon_sq, hausdorff_points_sq,
                      hausdorff_sq_1d)
from .minkowski import (iterate_process, minkowski_content_estimate, mstar_estimate,
                        steinhaus_map, tube_volume)
from .raster import INNER, rasterize
from .sets import Ball, ConvexPolytope, GridSet, IntervalUnion, PointSet, box, canonicalize

F = Fraction


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime: float
    limit: float
    detail: str
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"[{tag}] {self.number:>2} {self.name}: {self.detail} "
                f"({self.runtime:.2f} s, limit {self.limit:g} s)")

    def to_json(self):
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "runtime_s": round(self.runtime, 3), "limit_s": self.limit,
                "detail": self.detail, "data": self.data}


# --------------------------------------------------------------------------
# 1-2: exact worked examples


def c_two_point(seed: int):
    K0 = PointSet.from_points([(0,), (4,)])
    trace = iterate_process(K0, 10)
    got = [r.dH for r in trace]
    want = [F(4, 2 ** (n + 1)) for n in range(1, 11)]
    ok = got == want and all(r.dH_err == 0 for r in trace)
    return ok, f"dH = {', '.join(str(x) for x in got[:3])}, ..., {got[-1]}", {
        "dH": [str(x) for x in got]}


def c_k1_image(seed: int):
    got = steinhaus_map(k1_family(1, 4, 0))
    want = canonicalize([(-2, -2), (F(-5, 4), F(-3, 4)), (F(-1, 2), F(1, 2)),
                         (F(3, 4), F(5, 4)), (2, 2)])
    return got == want, f"S(K1(1,4,0)) = {got.intervals and _fmt_intervals(got)}", {}


def _fmt_intervals(K: IntervalUnion) -> str:
    return " ∪ ".join(f"[{a},{b}]" if a != b else f"{{{a}}}" for a, b in K.intervals)


# --------------------------------------------------------------------------
# 3: dyadic rate for point seeds


def random_point_seed(rng, max_points: int = 5, coord_max: int = 3, d: int = 2):
    k = int(rng.integers(2, max_points + 1))
    return PointSet.from_points([tuple(int(x) for x in rng.integers(0, coord_max + 1, d))
                                 for _ in range(k)])


def c_rate(seed: int, trials: int = 100):
    rng = np.random.default_rng(seed)
    d = 2
    fails, worst = 0, 0.0
    for _ in range(trials):
        K0 = random_point_seed(rng)
        trace = iterate_process(K0, 8, metrics=False)
        D_sq = diameter_sq(trace.hull)
        for n in range(3, 9):
            dh_sq = hausdorff_points_polygon_sq(trace[n].snapshot, trace.hull)
            bound_sq = D_sq * d * d / F(4) ** n
            if dh_sq > bound_sq:
                fails += 1
            elif bound_sq:
                worst = max(worst, math.sqrt(float(dh_sq / bound_sq)))
    return fails == 0, f"{trials} seeds, n=3..8, failures {fails}, max dH/bound {worst:.3f}", {
        "failures": fails, "max_ratio": worst}


# --------------------------------------------------------------------------
# 4: structural properties


def _random_points(rng, d, k, lo=-3, hi=3):
    return PointSet.from_points([tuple(int(x) for x in rng.integers(lo, hi + 1, d))
                                 for _ in range(k)])


def _random_intervals(rng, k=3):
    pairs = []
    for _ in range(k):
        a = F(int(rng.integers(-12, 12)), 4)
        pairs.append((a, a + F(int(rng.integers(0, 6)), 4)))
    return canonicalize(pairs)


def _random_grid(rng, size=5):
    m = rng.random((size, size)) < 0.5
    m[0, 0] = True
    return GridSet.from_mask(m, (int(rng.integers(-3, 3)), int(rng.integers(-3, 3))), F(1, 2))


def _symmetric_polygon(rng):
    pts = [tuple(F(int(x), 8) for x in rng.integers(-8, 9, 2)) for _ in range(4)]
    pts += [tuple(-c for c in p) for p in pts]
    return ConvexPolytope.from_points(pts)


def _same_grid(a: GridSet, b: GridSet) -> bool:
    h = min(a.h, b.h)
    return a.refine_to(h) == b.refine_to(h)


def c_properties(seed: int):
    rng = np.random.default_rng(seed)
    fails = {"symmetry": 0, "diameter": 0, "nesting": 0, "fixed_point": 0, "contraction": 0}
    for _ in range(100):
        sets = [_random_points(rng, int(rng.integers(1, 3)), int(rng.integers(1, 6))),
                _random_intervals(rng), _random_grid(rng)]
        for K in sets:
            S = steinhaus_map(K)
            zero = tuple(0 for _ in range(K.dimension))
            has0 = (S.contains(zero) if isinstance(S, PointSet) else
                    S.contains_point(0) if isinstance(S, IntervalUnion) else
                    bool(S.window([-1] * S.dimension, [2] * S.dimension).any()))
            if not (is_symmetric(S) and has0):
                fails["symmetry"] += 1
            if not isinstance(K, GridSet) and diameter_sq(S) != diameter_sq(K):
                fails["diameter"] += 1
            prev = S
            for _ in range(2 if isinstance(K, GridSet) else 3):
                nxt = steinhaus_map(prev)
                ok = (prev.refine_to(nxt.h).issubset(nxt) if isinstance(K, GridSet)
                      else prev.issubset(nxt))
                if not ok:
                    fails["nesting"] += 1
                prev = nxt
    # fixed points: symmetric convex sets are fixed, perturbed ones are not
    for _ in range(40):
        P = _symmetric_polygon(rng)
        if steinhaus_map(P) != P:
            fails["fixed_point"] += 1
        if P.affine_dim == 2:
            shifted = P.translate((F(1, 3), F(0)))
            if steinhaus_map(shifted) == shifted:
                fails["fixed_point"] += 1
        a = F(int(rng.integers(1, 8)), 4)
        I = canonicalize([(-a, a)])
        if steinhaus_map(I) != I:
            fails["fixed_point"] += 1
        b = a + F(int(rng.integers(1, 4)), 4)
        holed = canonicalize([(-b, -a), (a, b)])
        if steinhaus_map(holed) == holed:
            fails["fixed_point"] += 1
        n = int(rng.integers(1, 4))
        sq = GridSet.from_mask(np.ones((2 * n, 2 * n), bool), (-n, -n), F(1, 2))
        if not _same_grid(steinhaus_map(sq), sq):
            fails["fixed_point"] += 1
        ell = sq.mask.copy()
        ell[n:, n:] = False
        notch = GridSet.from_mask(ell & ell[::-1, ::-1], (-n, -n), F(1, 2))
        if _same_grid(steinhaus_map(notch), notch):
            fails["fixed_point"] += 1
    # contraction on point-set pairs
    for _ in range(500):
        d = int(rng.integers(1, 3))
        A = _random_points(rng, d, int(rng.integers(1, 6)))
        B = _random_points(rng, d, int(rng.integers(1, 6)))
        if d == 1:
            before = hausdorff_sq_1d(A, B)
            after = hausdorff_sq_1d(steinhaus_map(A), steinhaus_map(B))
        else:
            before = hausdorff_points_sq(A, B)
            after = hausdorff_points_sq(steinhaus_map(A), steinhaus_map(B))
        if after > before:
            fails["contraction"] += 1
    total = sum(fails.values())
    return total == 0, ", ".join(f"{k} {v}" for k, v in fails.items()) + " failures", fails


# --------------------------------------------------------------------------
# 5: weighted combinations


def c_oracle(seed: int):
    rng = np.random.default_rng(seed)
    checked = fails = 0
    for _ in range(40):
        d = int(rng.integers(1, 3))
        K0 = PointSet.from_points([tuple(int(x) for x in rng.integers(-2, 3, d))
                                   for _ in range(int(rng.integers(1, 5)))])
        K1 = steinhaus_map(K0)
        it = K1
        for n in range(1, 5):
            if n > 1:
                it = steinhaus_map(it)
            checked += 1
            if weighted_combination_set(K1, n) != it:
                fails += 1
    return fails == 0, f"{checked} (seed, n) pairs, mismatches {fails}", {"mismatches": fails}


# --------------------------------------------------------------------------
# 6: rectangle closed form


def c_rectangle(seed: int):
    h = F(1, 128)
    U = rasterize(box((0, 0), (2, 1)), h, INNER)
    rep = mstar_estimate(U)
    target = 2 * math.sqrt(5)
    lo, hi = rep.lower_estimate, float(rep.upper_bound)
    bracket_ok = lo <= target * (1 + 1e-12) and hi >= target * (1 - 1e-12) and (hi - lo) / lo <= 0.05
    b = theorem1_bound(U)
    ref = 1 / math.sqrt(5)
    bound_ok = 0.95 * ref <= float(b.bound_value) <= ref * (1 + 1e-12)
    tol = float(h) * math.sqrt(2)
    t_lo, t_hi = (float(x) for x in b.truth_bracket)
    truth_ok = abs(t_lo - 1) <= tol and abs(t_hi - 1) <= tol
    return bracket_ok and bound_ok and truth_ok, (
        f"M* in [{lo:.4f}, {hi:.4f}] (2√5 = {target:.4f}), bound {float(b.bound_value):.4f} "
        f"(1/√5 = {ref:.4f}), truth [{t_lo}, {t_hi}]"), {
        "mstar_lower": lo, "mstar_upper": hi, "bound": float(b.bound_value),
        "truth": [t_lo, t_hi]}


# --------------------------------------------------------------------------
# 7: 1D theorem


def c_one_d(seed: int):
    c = one_d_constants(1, 4, F(1, 2))
    const_ok = (c.n0, c.t0, c.l0) == (2, F(3, 4), 5)
    v = verify_one_d_containment(k1_family(1, 4, 0), F(1, 2))
    ok = const_ok and v.ok and v.n_star is not None and v.n_star <= 11
    return ok, (f"n0={c.n0}, t0={c.t0}, l0={c.l0}, threshold {c.N_threshold}; "
                f"containment from n*={v.n_star} through n={v.n_checked}, "
                f"L1 distance {v.l1_distance}"), {"n_star": v.n_star, "l1": str(v.l1_distance)}


# --------------------------------------------------------------------------
# 8: half hull


def c_half_hull(seed: int, trials: int = 20):
    rng = np.random.default_rng(seed)
    fails, ns = 0, []
    for _ in range(trials):
        size = int(rng.integers(3, 6))
        m = rng.random((size, size)) < 0.4
        m[0, 0] = True
        U = GridSet.from_mask(m, (0, 0), F(1))
        v = half_hull_check(U)
        ns.append(v.n)
        fails += not v.contained
    return fails == 0, f"{trials} grid seeds, thresholds {min(ns)}..{max(ns)}, failures {fails}", {
        "failures": fails}


# --------------------------------------------------------------------------
# 9: Steiner in the plane


def c_steiner(seed: int):
    sq = box((0, 0), (1, 1))
    worst, oracle_gap, ok = 0.0, 0.0, True
    for r in (F(1, 4), F(1, 2), F(1)):
        rep = steiner_2d_check(sq, r, F(1, 256))
        pred = 1 + 4 * float(r) + math.pi * float(r) ** 2
        worst = max(worst, rep.relative_error)
        oracle_gap = max(oracle_gap, abs(rep.offset_area - pred) / pred,
                         abs(rep.offset_perimeter - rep.predicted_perimeter) / rep.predicted_perimeter)
        ok &= rep.relative_error <= 0.01 and abs(rep.predicted_area - pred) <= 1e-12 * pred
    ok &= oracle_gap <= 1e-12
    return ok, f"max relative area error {worst:.4%}, offset-polygon gap {oracle_gap:.1e}", {
        "max_relative_error": worst, "oracle_gap": oracle_gap}


# --------------------------------------------------------------------------
# 10: tube and content


def c_tube(seed: int):
    U = rasterize(Ball((0, 0), 1), F(1, 256))
    tv = tube_volume(U, F(1, 4))
    tube_err = abs(float(tv) - math.pi) / math.pi
    ce = minkowski_content_estimate(U)
    ratio = ce.ratios[-1]
    content_err = abs(ratio - 2 * math.pi) / (2 * math.pi)
    ok = tube_err <= 0.03 and content_err <= 0.03
    return ok, (f"tube(1/4) = {float(tv):.4f} ({tube_err:.2%} from π); content ratio at "
                f"x={ce.radii[-1]:g}: {ratio:.4f} ({content_err:.2%} from 2π)"), {
        "tube": float(tv), "tube_error": tube_err, "ratio": ratio, "content_error": content_err,
        "ratios": list(ce.ratios)}


# --------------------------------------------------------------------------
# 11: Kakeya equivalence


def random_convex_polygon(rng, k: int = 8, den: int = 1000):
    while True:
        pts = [tuple(F(int(x), den) for x in rng.integers(0, den + 1, 2)) for _ in range(k)]
        P = ConvexPolytope.from_points(pts)
        if P.affine_dim == 2:
            return P


def c_kakeya(seed: int):
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, 0
    for _ in range(50):
        rep = kakeya_equivalence_check(random_convex_polygon(rng))
        worst = max(worst, rep.relative_gap)
        fails += not rep.agree
    s = 2 / math.sqrt(3)
    T = ConvexPolytope.from_points([(0.0, 0.0), (s, 0.0), (s / 2, 1.0)])
    area = float(shape_functionals(T).A)
    pal = area ** 0.5 * 3 ** 0.25
    needle = float(kakeya_equivalence_check(T).r_kakeya)
    ok = fails == 0 and abs(pal - 1) <= 1e-12 and abs(needle - 1) <= 1e-12
    return ok, (f"50 polygons, max relative gap {worst:.2e}; triangle |K|^0.5·3^0.25 = {pal!r}, "
                f"r = {needle!r}"), {"max_gap": worst, "pal": pal}


# --------------------------------------------------------------------------
# 12: soundness sweep


def random_mixed_grid(rng, h=F(1, 16)) -> GridSet:
    kind = rng.integers(0, 3)
    n = 32
    m = np.zeros((n, n), dtype=bool)
    if kind == 0:  # union of rectangles
        for _ in range(int(rng.integers(1, 5))):
            x0, y0 = rng.integers(0, n - 2, 2)
            x1, y1 = x0 + rng.integers(1, n // 2, 2)
            m[x0:x1, y0:y1] = True
    elif kind == 1:  # discretized ellipse
        a, b = rng.uniform(2, n / 2, 2)
        cx, cy = rng.uniform(a, n - a), rng.uniform(min(b, n - b), max(b, n - b))
        x, y = np.indices((n, n)) + 0.5
        m = ((x - cx) / a) ** 2 + ((y - cy) / b) ** 2 <= 1
    else:  # L-shape
        w, t = int(rng.integers(4, n)), int(rng.integers(1, 6))
        m[:w, :t] = True
        m[:t, :w] = True
    if not m.any():
        m[0, 0] = True
    return GridSet.from_mask(m, tuple(int(v) for v in rng.integers(-n, n, 2)), h)


def c_soundness(seed: int, trials: int = 200):
    rng = np.random.default_rng(seed)
    bad, slack = 0, []
    for _ in range(trials):
        U = random_mixed_grid(rng)
        b = theorem1_bound(U, truth=False)
        rho = steinhaus_radius_bruteforce(U)[1]
        if b.bound_value > rho:
            bad += 1
        slack.append(float(rho) / float(b.bound_value))
    return bad == 0, f"{trials} grids, violations {bad}, truth/bound in [{min(slack):.2f}, {max(slack):.2f}]", {
        "violations": bad}


# --------------------------------------------------------------------------


CRITERIA: list[tuple[int, str, str, float, Callable]] = [
    (1, "two-point", "two-point seed exact trace", 1, c_two_point),
    (2, "k1-image", "exact image of K1(1,4,0)", 1, c_k1_image),
    (3, "rate", "dyadic rate for planar point seeds", 30, c_rate),
    (4, "properties", "symmetry, diameter, nesting, fixed points, contraction", 60, c_properties),
    (5, "oracle", "weighted combinations equal iterates", 30, c_oracle),
    (6, "rectangle", "rectangle M* bracket and radius bound", 60, c_rectangle),
    (7, "one-d", "1D theorem with explicit constants", 10, c_one_d),
    (8, "half-hull", "half-hull inclusion past the threshold", 120, c_half_hull),
    (9, "steiner", "planar Steiner formula", 60, c_steiner),
    (10, "tube", "tube volume and content ratio of the disk", 60, c_tube),
    (11, "kakeya", "Kakeya equivalence and the triangle equality", 30, c_kakeya),
    (12, "soundness", "radius bound never exceeds the brute-force truth", 300, c_soundness),
]


def criterion_names():
    return [c[1] for c in CRITERIA]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    num, key, name, limit, fn = CRITERIA[number - 1]
    t = time.perf_counter()
    try:
        ok, detail, data = fn(seed)
    except Exception as exc:  # a crash is a failure, reported with its message
        ok, detail, data = False, f"error: {type(exc).__name__}: {exc}", {}
    rt = time.perf_counter() - t
    if rt > limit:
        detail += "; over time limit"
    return CriterionResult(num, key, bool(ok) and rt <= limit, rt, limit, detail, data)


def run_acceptance(only: Optional[list] = None, seed: int = 0, echo: bool = False):
    results = []
    for num, key, *_ in CRITERIA:
        if only and key not in only and str(num) not in only:
            continue
        r = run_criterion(num, seed)
        if echo:
            print(r.line(), flush=True)
        results.append(r)
    return results
