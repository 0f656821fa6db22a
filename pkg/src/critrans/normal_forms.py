"""Fast-subsystem bifurcation normal forms up to codimension two.

Each catalog entry carries its vector field, the linearization along the
attracting branch of the critical manifold, and the slow-flow rule that
decides whether passing through the bifurcation is a critical transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Kind",
    "Verdict",
    "AuxParams",
    "NormalFormEntry",
    "SlowFlowData",
    "PreconditionError",
    "NoAttractingBranchError",
    "catalog",
    "entry",
    "fast_vector_field",
    "batch_vector_field",
    "fast_jacobian",
    "linearization_A0",
    "critical_manifold_branch",
    "attracting_sample",
    "classify_transition",
    "explain_transition",
    "cusp_roots",
    "TABLE_DIVERGENCES",
]


class Kind(str, Enum):
    FOLD = "fold"
    TRANSCRITICAL = "transcritical"
    PITCHFORK = "pitchfork"
    HOPF = "hopf"
    CUSP = "cusp"
    BAUTIN = "bautin"
    BOGDANOV_TAKENS = "bogdanov-takens"
    FOLD_HOPF = "fold-hopf"
    HOPF_HOPF = "hopf-hopf"


class Verdict(str, Enum):
    CRITICAL = "Critical"
    NOT_CRITICAL = "NotCritical"
    INDETERMINATE = "Indeterminate"


class PreconditionError(ValueError):
    """Raised when y is not on the attracting side of an entry."""


class NoAttractingBranchError(PreconditionError):
    pass


_DIMS = {
    Kind.FOLD: (1, 1),
    Kind.TRANSCRITICAL: (1, 1),
    Kind.PITCHFORK: (1, 1),
    Kind.HOPF: (2, 1),
    Kind.CUSP: (1, 2),
    Kind.BAUTIN: (2, 2),
    Kind.BOGDANOV_TAKENS: (2, 2),
    Kind.FOLD_HOPF: (3, 2),
    Kind.HOPF_HOPF: (4, 2),
}

_CODIM = {
    Kind.FOLD: 1, Kind.TRANSCRITICAL: 1, Kind.PITCHFORK: 1, Kind.HOPF: 1,
    Kind.CUSP: 2, Kind.BAUTIN: 2, Kind.BOGDANOV_TAKENS: 2,
    Kind.FOLD_HOPF: 2, Kind.HOPF_HOPF: 2,
}


@dataclass(frozen=True)
class AuxParams:
    """Auxiliary normal-form coefficients.

    ``k`` is the magnitude of the trace slot of the Bogdanov-Takens
    linearization, which is realized as ``-k*sqrt(-y1)`` so the attracting
    branch is Hurwitz.
    """

    s: int = 1
    l1: float = 1.0
    l2: int = 1
    theta0: float = 1.0
    omega: float = 1.0
    omega1: float = 1.0
    omega2: float = 1.5
    k: float = 1.0
    hh_p: tuple = ((-1.0, -1.0), (-1.0, -1.0))
    hh_s: tuple = (1, 1)

    def __post_init__(self):
        if self.s not in (1, -1):
            raise ValueError("s must be +1 or -1")
        if self.l2 not in (1, -1):
            raise ValueError("l2 must be +1 or -1")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if tuple(self.hh_s) != tuple(int(v) for v in self.hh_s) or any(v not in (1, -1) for v in self.hh_s):
            raise ValueError("hh_s entries must be +1 or -1")


@dataclass(frozen=True)
class NormalFormEntry:
    kind: Kind
    m: int
    n: int
    aux: AuxParams = field(default_factory=AuxParams)

    @property
    def codimension(self) -> int:
        return _CODIM[self.kind]

    def with_aux(self, **changes) -> "NormalFormEntry":
        return replace(self, aux=replace(self.aux, **changes))


@dataclass(frozen=True)
class SlowFlowData:
    """Slow drift at the bifurcation point plus the derivatives some rules need."""

    g_at_origin: tuple
    dg2_dy2: Optional[float] = None
    j2: Optional[float] = None

    def __post_init__(self):
        g = tuple(float(v) for v in np.atleast_1d(self.g_at_origin))
        object.__setattr__(self, "g_at_origin", g)
        vals = list(g)
        if self.dg2_dy2 is not None:
            vals.append(self.dg2_dy2)
        if self.j2 is not None:
            vals.append(self.j2)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("slow-flow data must be finite")

    def scaled(self, lam: float) -> "SlowFlowData":
        # dg2_dy2 enters the rules as an absolute threshold, so it is not scaled
        return SlowFlowData(
            tuple(lam * v for v in self.g_at_origin),
            self.dg2_dy2,
            None if self.j2 is None else lam * self.j2,
        )


def _check_hopf_hopf(aux: AuxParams) -> None:
    w1, w2 = aux.omega1, aux.omega2
    if w1 == 0 or w2 == 0:
        raise ValueError("Hopf-Hopf frequencies must be nonzero")
    for a in range(1, 3):
        for b in range(1, 4 - a):
            if math.isclose(a * abs(w1), b * abs(w2), rel_tol=1e-12, abs_tol=0.0):
                raise ValueError(f"resonant frequencies: {a}*omega1 = {b}*omega2")


def entry(kind, **aux) -> NormalFormEntry:
    """Build a catalog entry of the given kind with optional aux overrides."""
    kind = Kind(kind)
    m, n = _DIMS[kind]
    params = AuxParams(**aux)
    if kind is Kind.HOPF_HOPF:
        _check_hopf_hopf(params)
    if kind is Kind.FOLD_HOPF and params.omega == 0:
        raise ValueError("fold-Hopf rotation omega must be nonzero")
    return NormalFormEntry(kind, m, n, params)


def catalog() -> list:
    """All nine entries, ordered by codimension and then fast dimension."""
    order = [Kind.FOLD, Kind.TRANSCRITICAL, Kind.PITCHFORK, Kind.HOPF,
             Kind.CUSP, Kind.BAUTIN, Kind.BOGDANOV_TAKENS, Kind.FOLD_HOPF, Kind.HOPF_HOPF]
    return [entry(k) for k in order]


def _as_vec(v, size: int, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ValueError(f"{name} must have length {size}, got shape {np.shape(v)}")
    return arr


def fast_vector_field(e: NormalFormEntry, x, y) -> np.ndarray:
    return _field(e, _as_vec(x, e.m, "x"), _as_vec(y, e.n, "y"))


def batch_vector_field(e: NormalFormEntry, X, Y) -> np.ndarray:
    """Row-wise drift for (B, m) states and (B, n) slow values."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return _field(e, X.T, Y.T).T


def _field(e: NormalFormEntry, x, y) -> np.ndarray:
    # elementwise in every component, so x and y may carry a trailing batch axis
    a = e.aux
    k = e.kind
    if k is Kind.FOLD:
        return np.array([-y[0] - x[0] ** 2])
    if k is Kind.TRANSCRITICAL:
        return np.array([y[0] * x[0] - x[0] ** 2])
    if k is Kind.PITCHFORK:
        return np.array([y[0] * x[0] + a.s * x[0] ** 3])
    if k is Kind.CUSP:
        return np.array([y[0] + y[1] * x[0] + a.s * x[0] ** 3])
    if k is Kind.HOPF:
        r2 = x[0] ** 2 + x[1] ** 2
        return np.array([y[0] * x[0] - x[1] + a.l1 * x[0] * r2,
                         x[0] + y[0] * x[1] + a.l1 * x[1] * r2])
    if k is Kind.BAUTIN:
        r2 = x[0] ** 2 + x[1] ** 2
        c = y[1] * r2 + a.l2 * r2 ** 2
        return np.array([y[0] * x[0] - x[1] + c * x[0],
                         x[0] + y[0] * x[1] + c * x[1]])
    if k is Kind.BOGDANOV_TAKENS:
        return np.array([x[1], y[0] + y[1] * x[1] + x[0] ** 2 + a.s * x[0] * x[1]])
    if k is Kind.FOLD_HOPF:
        th, w = a.theta0, a.omega
        x1, x2, x3 = x
        return np.array([
            y[0] + x1 ** 2 + a.s * (x2 ** 2 + x3 ** 2),
            y[1] * x2 - w * x3 + th * x1 * x2 - x1 * x3 + x1 ** 2 * x2,
            w * x2 + y[1] * x3 + x1 * x2 + th * x1 * x3 + x1 ** 2 * x3,
        ])
    if k is Kind.HOPF_HOPF:
        # polar amplitude equations written in Cartesian pairs (x1,x2), (x3,x4)
        p = np.asarray(a.hh_p, dtype=float)
        s1, s2 = a.hh_s
        r1sq = x[0] ** 2 + x[1] ** 2
        r2sq = x[2] ** 2 + x[3] ** 2
        a1 = y[0] + p[0, 0] * r1sq + p[0, 1] * r2sq + s1 * r2sq ** 2
        a2 = y[1] + p[1, 0] * r1sq + p[1, 1] * r2sq + s2 * r1sq ** 2
        return np.array([
            x[0] * a1 - a.omega1 * x[1],
            x[1] * a1 + a.omega1 * x[0],
            x[2] * a2 - a.omega2 * x[3],
            x[3] * a2 + a.omega2 * x[2],
        ])
    raise ValueError(f"unknown kind {k}")


def fast_jacobian(e: NormalFormEntry, x, y) -> np.ndarray:
    """Exact D_x f at (x, y), used to cross-check the tabulated linearizations."""
    x = _as_vec(x, e.m, "x")
    y = _as_vec(y, e.n, "y")
    a = e.aux
    k = e.kind
    if k is Kind.FOLD:
        return np.array([[-2.0 * x[0]]])
    if k is Kind.TRANSCRITICAL:
        return np.array([[y[0] - 2.0 * x[0]]])
    if k is Kind.PITCHFORK:
        return np.array([[y[0] + 3.0 * a.s * x[0] ** 2]])
    if k is Kind.CUSP:
        return np.array([[y[1] + 3.0 * a.s * x[0] ** 2]])
    if k in (Kind.HOPF, Kind.BAUTIN):
        x1, x2 = x
        r2 = x1 ** 2 + x2 ** 2
        if k is Kind.HOPF:
            c, dc = a.l1 * r2, a.l1
            mu = y[0]
        else:
            c, mu = y[1] * r2 + a.l2 * r2 ** 2, y[0]
            dc = y[1] + 2.0 * a.l2 * r2  # dc/d(r2)
        return np.array([
            [mu + c + 2 * dc * x1 * x1, -1.0 + 2 * dc * x1 * x2],
            [1.0 + 2 * dc * x1 * x2, mu + c + 2 * dc * x2 * x2],
        ])
    if k is Kind.BOGDANOV_TAKENS:
        x1, x2 = x
        return np.array([[0.0, 1.0], [2 * x1 + a.s * x2, y[1] + a.s * x1]])
    if k is Kind.FOLD_HOPF:
        th, w = a.theta0, a.omega
        x1, x2, x3 = x
        d = y[1] + th * x1 + x1 ** 2
        return np.array([
            [2 * x1, 2 * a.s * x2, 2 * a.s * x3],
            [th * x2 - x3 + 2 * x1 * x2, d, -w - x1],
            [x2 + th * x3 + 2 * x1 * x3, w + x1, d],
        ])
    if k is Kind.HOPF_HOPF:
        h = 1e-6
        J = np.empty((4, 4))
        for j in range(4):
            dx = np.zeros(4)
            dx[j] = h
            J[:, j] = (fast_vector_field(e, x + dx, y) - fast_vector_field(e, x - dx, y)) / (2 * h)
        return J
    raise ValueError(f"unknown kind {k}")


def cusp_roots(p: float, q: float, tol: float = 1e-12) -> np.ndarray:
    """Real roots of t^3 + p t + q = 0 by the trigonometric / Cardano formulas.

    Roots closer than the discriminant tolerance are merged.
    """
    disc = -(4.0 * p ** 3 + 27.0 * q ** 2)
    # relative to the size of its two terms, so small |p| is not mistaken for a double root
    scale = 4.0 * abs(p) ** 3 + 27.0 * q ** 2
    if scale == 0.0:
        return np.array([0.0])
    if abs(disc) <= tol * scale:
        # one double root and one simple root
        t_simple = 3.0 * q / p
        t_double = -3.0 * q / (2.0 * p)
        return np.sort(np.array([t_double, t_simple]))
    if disc > 0:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        phi = math.acos(max(-1.0, min(1.0, arg)))
        roots = [r * math.cos((phi - 2.0 * math.pi * j) / 3.0) for j in range(3)]
        return np.sort(np.array(roots))
    sq = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    u = math.copysign(abs(-q / 2.0 + sq) ** (1.0 / 3.0), -q / 2.0 + sq)
    v = math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
    return np.array([u + v])


def critical_manifold_branch(e: NormalFormEntry, y) -> np.ndarray:
    """Attracting branch h0(y) of the critical manifold."""
    y = _as_vec(y, e.n, "y")
    a = e.aux
    k = e.kind
    if k is Kind.FOLD:
        if not y[0] < 0:
            raise NoAttractingBranchError("fold: attracting branch needs y < 0")
        return np.array([math.sqrt(-y[0])])
    if k in (Kind.TRANSCRITICAL, Kind.PITCHFORK):
        if not y[0] < 0:
            raise NoAttractingBranchError(f"{k.value}: trivial branch attracts only for y < 0")
        return np.array([0.0])
    if k is Kind.CUSP:
        # a.s * (x^3 + (s y2) x + s y1) = f
        roots = cusp_roots(a.s * y[1], a.s * y[0])
        good = [t for t in roots if y[1] + 3.0 * a.s * t * t < 0]
        if len(good) != 1:
            raise NoAttractingBranchError(
                f"cusp: {len(good)} attracting roots at y={tuple(y)}; need exactly one")
        return np.array([good[0]])
    if k is Kind.HOPF:
        if not y[0] < 0:
            raise NoAttractingBranchError("hopf: attracting only for y < 0")
        return np.zeros(2)
    if k is Kind.BAUTIN:
        if not y[0] < 0:
            raise NoAttractingBranchError("bautin: attracting only for y1 < 0")
        return np.zeros(2)
    if k is Kind.BOGDANOV_TAKENS:
        if not y[0] < 0:
            raise NoAttractingBranchError("bogdanov-takens: branch needs y1 < 0")
        w = math.sqrt(-y[0])
        if not y[1] - a.s * w < 0:
            raise NoAttractingBranchError("bogdanov-takens: need y2 < s*sqrt(-y1)")
        return np.array([-w, 0.0])
    if k is Kind.FOLD_HOPF:
        if not y[0] < 0:
            raise NoAttractingBranchError("fold-hopf: branch needs y1 < 0")
        w = math.sqrt(-y[0])
        if not y[1] - a.theta0 * w < 0:
            raise NoAttractingBranchError("fold-hopf: need y2 < theta0*sqrt(-y1)")
        return np.array([-w, 0.0, 0.0])
    if k is Kind.HOPF_HOPF:
        if not (y[0] < 0 and y[1] < 0):
            raise NoAttractingBranchError("hopf-hopf: need y1 < 0 and y2 < 0")
        return np.zeros(4)
    raise ValueError(f"unknown kind {k}")


def linearization_A0(e: NormalFormEntry, y) -> np.ndarray:
    """Linearization along the attracting branch in its tabulated leading-order form."""
    h = critical_manifold_branch(e, y)  # raises on the repelling side
    y = _as_vec(y, e.n, "y")
    a = e.aux
    k = e.kind
    if k is Kind.FOLD:
        return np.array([[-2.0 * math.sqrt(-y[0])]])
    if k in (Kind.TRANSCRITICAL, Kind.PITCHFORK):
        return np.array([[y[0]]])
    if k is Kind.CUSP:
        return np.array([[y[1] + 3.0 * a.s * h[0] ** 2]])
    if k in (Kind.HOPF, Kind.BAUTIN):
        return np.array([[y[0], -1.0], [1.0, y[0]]])
    if k is Kind.BOGDANOV_TAKENS:
        w = math.sqrt(-y[0])
        return np.array([[0.0, 1.0], [-2.0 * w, -a.k * w]])
    if k is Kind.FOLD_HOPF:
        w = math.sqrt(-y[0])
        d = y[1] - a.theta0 * w
        om = a.omega
        return np.array([[-2.0 * w, 0.0, 0.0], [0.0, d, -om], [0.0, om, d]])
    if k is Kind.HOPF_HOPF:
        w1, w2 = a.omega1, a.omega2
        A = np.zeros((4, 4))
        A[:2, :2] = [[y[0], -w1], [w1, y[0]]]
        A[2:, 2:] = [[y[1], -w2], [w2, y[1]]]
        return A
    raise ValueError(f"unknown kind {k}")


def attracting_sample(e: NormalFormEntry, t: float) -> np.ndarray:
    """A point on the attracting side at distance scale t > 0 from the bifurcation.

    Used to build approach grids; t -> 0 approaches the bifurcation point.
    """
    k = e.kind
    a = e.aux
    if k in (Kind.FOLD, Kind.TRANSCRITICAL, Kind.PITCHFORK, Kind.HOPF):
        return np.array([-t])
    if k is Kind.CUSP:
        # y1 = 0 puts the attracting root at x = 0 for s = 1
        if a.s == 1:
            return np.array([0.0, -t])
        return np.array([0.0, -t])
    if k is Kind.BAUTIN:
        return np.array([-t, 0.0])
    if k is Kind.BOGDANOV_TAKENS:
        return np.array([-t * t, -(abs(a.s) + 1.0) * t])
    if k is Kind.FOLD_HOPF:
        return np.array([-t * t, -(abs(a.theta0) + 1.0) * t])
    if k is Kind.HOPF_HOPF:
        return np.array([-t, -1.3 * t])
    raise ValueError(f"unknown kind {k}")


# ---------------------------------------------------------------------------
# transition rules

def _sign_rule_1d(g: float, critical_if_positive: bool):
    if g > 0:
        return (Verdict.CRITICAL if critical_if_positive else Verdict.NOT_CRITICAL)
    if g < 0:
        return Verdict.NOT_CRITICAL
    return Verdict.INDETERMINATE


def explain_transition(e: NormalFormEntry, slow: SlowFlowData):
    """Return (verdict, rule) where rule is the governing condition in words."""
    g = slow.g_at_origin
    if len(g) != e.n:
        raise ValueError(f"slow data has {len(g)} components, entry needs {e.n}")
    a = e.aux
    k = e.kind
    if k is Kind.FOLD:
        rule = "fold: critical iff g > 0 (g < 0 never reaches the fold)"
        return _sign_rule_1d(g[0], True), rule
    if k is Kind.PITCHFORK:
        rule = "pitchfork: for g > 0 critical iff subcritical (s = 1)"
        return _sign_rule_1d(g[0], a.s == 1), rule
    if k is Kind.TRANSCRITICAL:
        rule = "transcritical: critical iff g != 0"
        v = Verdict.CRITICAL if g[0] != 0 else Verdict.INDETERMINATE
        return v, rule
    if k is Kind.HOPF:
        rule = "hopf: for g > 0 critical iff subcritical (l1 > 0)"
        if g[0] > 0:
            if a.l1 > 0:
                return Verdict.CRITICAL, rule
            if a.l1 < 0:
                return Verdict.NOT_CRITICAL, rule
            return Verdict.INDETERMINATE, rule + "; l1 = 0 is the Bautin case"
        if g[0] < 0:
            return Verdict.NOT_CRITICAL, rule
        return Verdict.INDETERMINATE, rule
    if k is Kind.CUSP:
        rule = "cusp: never critical for s = -1; for s = 1 critical iff g2 > 0 and g1 = 0"
        if a.s == -1:
            return Verdict.NOT_CRITICAL, rule
        ok = g[1] > 0 and g[0] == 0
        return (Verdict.CRITICAL if ok else Verdict.NOT_CRITICAL), rule
    if k is Kind.BAUTIN:
        rule = ("bautin: never critical for l2 < 0; for l2 > 0 critical iff g1 > 0 and "
                "(g2 != 0 or (g2 = 0 and dg2/dy2 < 1/2))")
        if a.l2 < 0:
            return Verdict.NOT_CRITICAL, rule
        if not g[0] > 0:
            return Verdict.NOT_CRITICAL, rule
        if g[1] != 0:
            return Verdict.CRITICAL, rule
        if slow.dg2_dy2 is None:
            return Verdict.INDETERMINATE, rule + "; dg2/dy2 not supplied"
        return (Verdict.CRITICAL if slow.dg2_dy2 < 0.5 else Verdict.NOT_CRITICAL), rule
    if k is Kind.BOGDANOV_TAKENS:
        rule = ("bogdanov-takens: for s = -1 critical iff g2 > 0 and g1 = 0; for s = 1 critical "
                "iff g1 > 0, or g1 = 0, g2 > 0 and dg2/dy2 < -2")
        if a.s == -1:
            ok = g[1] > 0 and g[0] == 0
            return (Verdict.CRITICAL if ok else Verdict.NOT_CRITICAL), rule
        if g[0] > 0:
            return Verdict.CRITICAL, rule
        if g[0] == 0 and g[1] > 0:
            if slow.dg2_dy2 is None:
                return Verdict.INDETERMINATE, rule + "; dg2/dy2 not supplied"
            return (Verdict.CRITICAL if slow.dg2_dy2 < -2 else Verdict.NOT_CRITICAL), rule
        return Verdict.NOT_CRITICAL, rule
    if k is Kind.FOLD_HOPF:
        th = a.theta0
        if th > 0 and a.s == 1:
            rule = "fold-hopf (theta > 0, s = 1): critical iff g1 > 0, or g1 = 0 and g2 > 0"
            ok = g[0] > 0 or (g[0] == 0 and g[1] > 0)
            return (Verdict.CRITICAL if ok else Verdict.NOT_CRITICAL), rule
        if th > 0:
            rule = ("fold-hopf (theta > 0, s = -1): critical iff g1 > 0 and g2 < J2, "
                    "J2 the y2-tangent of the cycle blow-up curve")
            if not g[0] > 0:
                return Verdict.NOT_CRITICAL, rule
            if slow.j2 is None:
                return Verdict.INDETERMINATE, rule + "; J2 not supplied"
            return (Verdict.CRITICAL if g[1] < slow.j2 else Verdict.NOT_CRITICAL), rule
        if th < 0:
            rule = "fold-hopf (theta < 0): critical iff g1 = 0 and g2 > 0"
            ok = g[0] == 0 and g[1] > 0
            return (Verdict.CRITICAL if ok else Verdict.NOT_CRITICAL), rule
        return Verdict.INDETERMINATE, "fold-hopf: theta(0) = 0 is degenerate"
    if k is Kind.HOPF_HOPF:
        return Verdict.INDETERMINATE, "hopf-hopf: only a special case is analysed"
    raise ValueError(f"unknown kind {k}")


def classify_transition(e: NormalFormEntry, slow: SlowFlowData) -> Verdict:
    return explain_transition(e, slow)[0]


# Inputs on which the condensed summary table and the lemma statements disagree.
# Each record: (kind, aux overrides, slow data, lemma verdict, table verdict, note).
TABLE_DIVERGENCES = [
    (Kind.CUSP, {"s": 1}, SlowFlowData((0.0, 0.5)), Verdict.CRITICAL, Verdict.NOT_CRITICAL,
     "table attaches the cusp condition to s = -1, the lemma to s = 1"),
    (Kind.CUSP, {"s": -1}, SlowFlowData((0.0, 0.5)), Verdict.NOT_CRITICAL, Verdict.CRITICAL,
     "same sign swap seen from s = -1"),
    (Kind.BOGDANOV_TAKENS, {"s": -1}, SlowFlowData((0.0, 0.5)), Verdict.CRITICAL, Verdict.NOT_CRITICAL,
     "table lists g1 > 0, g2 = 0 for s = -1; lemma requires g2 > 0, g1 = 0"),
    (Kind.BOGDANOV_TAKENS, {"s": -1}, SlowFlowData((0.5, 0.0)), Verdict.NOT_CRITICAL, Verdict.CRITICAL,
     "roles of g1 and g2 swapped"),
    (Kind.FOLD_HOPF, {"theta0": -1.0}, SlowFlowData((0.0, 0.5)), Verdict.CRITICAL, Verdict.NOT_CRITICAL,
     "table lists g1 > 0, g2 = 0 for theta < 0; lemma requires g1 = 0, g2 > 0"),
    (Kind.FOLD_HOPF, {"theta0": -1.0}, SlowFlowData((0.5, 0.0)), Verdict.NOT_CRITICAL, Verdict.CRITICAL,
     "roles of g1 and g2 swapped"),
    (Kind.BOGDANOV_TAKENS, {"s": 1}, SlowFlowData((0.0, 0.5), dg2_dy2=-3.0), Verdict.CRITICAL, Verdict.CRITICAL,
     "table writes the derivative threshold without naming g2; read as dg2/dy2 < -2"),
]
