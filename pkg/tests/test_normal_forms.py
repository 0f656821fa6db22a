import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critrans.normal_forms import (TABLE_DIVERGENCES, Kind, NoAttractingBranchError, PreconditionError,
                                   SlowFlowData, Verdict, attracting_sample, batch_vector_field, catalog,
                                   classify_transition, critical_manifold_branch, cusp_roots, entry,
                                   explain_transition, fast_jacobian, fast_vector_field, linearization_A0)

DIMS = {
    Kind.FOLD: (1, 1), Kind.TRANSCRITICAL: (1, 1), Kind.PITCHFORK: (1, 1), Kind.CUSP: (1, 2),
    Kind.HOPF: (2, 1), Kind.BAUTIN: (2, 2), Kind.BOGDANOV_TAKENS: (2, 2), Kind.FOLD_HOPF: (3, 2),
    Kind.HOPF_HOPF: (4, 2),
}


def test_catalog_has_nine_entries_in_order():
    cat = catalog()
    assert len(cat) == 9
    assert cat[0].kind is Kind.FOLD and (cat[0].m, cat[0].n) == (1, 1)
    keys = [(e.codimension, e.m) for e in cat]
    assert keys == sorted(keys)


@pytest.mark.parametrize("kind", list(Kind))
def test_dimensions(kind):
    e = entry(kind)
    assert (e.m, e.n) == DIMS[kind]


@pytest.mark.parametrize("kind", list(Kind))
def test_origin_is_equilibrium(kind):
    e = entry(kind)
    assert np.allclose(fast_vector_field(e, np.zeros(e.m), np.zeros(e.n)), 0.0)


def test_vector_field_examples():
    assert fast_vector_field(entry("fold"), [0.5], [-0.25])[0] == pytest.approx(0.0)
    assert fast_vector_field(entry("cusp", s=1), [1.0], [0.0, -1.0])[0] == pytest.approx(0.0)
    assert np.allclose(fast_vector_field(entry("hopf", l1=1.0), [0.0, 0.0], [0.3]), 0.0)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        fast_vector_field(entry("hopf"), [0.0], [0.1])
    with pytest.raises(ValueError):
        fast_vector_field(entry("cusp"), [0.0], [0.1])


@pytest.mark.parametrize("kind", list(Kind))
def test_batch_field_matches_rowwise(kind):
    e = entry(kind)
    rng = np.random.default_rng(3)
    X = rng.normal(size=(7, e.m))
    Y = rng.normal(size=(7, e.n))
    B = batch_vector_field(e, X, Y)
    for i in range(7):
        assert np.allclose(B[i], fast_vector_field(e, X[i], Y[i]), rtol=1e-14, atol=1e-14)


def test_linearization_examples():
    assert linearization_A0(entry("fold"), [-0.25])[0, 0] == pytest.approx(-1.0)
    assert np.allclose(linearization_A0(entry("hopf"), [-0.1]), [[-0.1, -1.0], [1.0, -0.1]])
    A = linearization_A0(entry("fold-hopf", omega=2.0), [-0.04, -0.1])
    assert A[0, 0] == pytest.approx(-0.4)
    assert A[1, 2] == pytest.approx(-2.0) and A[2, 1] == pytest.approx(2.0)


def test_branch_examples():
    assert critical_manifold_branch(entry("fold"), [-0.25])[0] == pytest.approx(0.5)
    assert critical_manifold_branch(entry("pitchfork"), [-0.3])[0] == 0.0
    assert critical_manifold_branch(entry("cusp", s=1), [0.0, -3.0])[0] == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("kind,y", [("fold", [0.1]), ("hopf", [0.2]), ("pitchfork", [0.0]),
                                    ("bogdanov-takens", [0.1, -1.0]), ("hopf-hopf", [-0.1, 0.1])])
def test_repelling_side_raises(kind, y):
    with pytest.raises(PreconditionError):
        linearization_A0(entry(kind), y)


def test_cusp_without_unique_attracting_root():
    # inside the cusp wedge, s = -1 has two attracting roots
    with pytest.raises(NoAttractingBranchError):
        critical_manifold_branch(entry("cusp", s=-1), [0.0, 3.0])


def test_cusp_roots_cover_multiplicities():
    assert np.allclose(cusp_roots(-3.0, 0.0), [-math.sqrt(3), 0.0, math.sqrt(3)])
    assert np.allclose(cusp_roots(0.0, 0.0), [0.0])
    # t^3 - 3t + 2 = (t-1)^2 (t+2)
    assert np.allclose(cusp_roots(-3.0, 2.0), [-2.0, 1.0])
    r = cusp_roots(1.0, 1.0)
    assert len(r) == 1 and r[0] ** 3 + r[0] + 1 == pytest.approx(0.0, abs=1e-12)


GRID = np.logspace(-3, 0, 9)


@pytest.mark.parametrize("kind", [Kind.FOLD, Kind.TRANSCRITICAL, Kind.PITCHFORK, Kind.CUSP, Kind.HOPF,
                                  Kind.BAUTIN])
def test_A0_matches_finite_differences(kind):
    e = entry(kind)
    for t in GRID:
        y = attracting_sample(e, float(t))
        x = critical_manifold_branch(e, y)
        J = np.empty((e.m, e.m))
        for j in range(e.m):
            h = 1e-5 * max(1.0, abs(x[j]))
            d = np.zeros(e.m)
            d[j] = h
            J[:, j] = (fast_vector_field(e, x + d, y) - fast_vector_field(e, x - d, y)) / (2 * h)
        A = linearization_A0(e, y)
        assert np.linalg.norm(A - J) <= 1e-6 * np.linalg.norm(A)


@pytest.mark.parametrize("kind", list(Kind))
def test_A0_is_hurwitz_on_attracting_side(kind):
    e = entry(kind)
    for t in GRID:
        y = attracting_sample(e, float(t))
        A = linearization_A0(e, y)
        assert np.max(np.linalg.eigvals(A).real) < 0
        if kind in (Kind.BOGDANOV_TAKENS, Kind.FOLD_HOPF):
            # leading-order matrix and exact Jacobian agree in eigenvalue signs
            Jx = fast_jacobian(e, critical_manifold_branch(e, y), y)
            assert np.max(np.linalg.eigvals(Jx).real) < 0


def test_hopf_hopf_resonance_rejected():
    with pytest.raises(ValueError):
        entry("hopf-hopf", omega1=1.0, omega2=2.0)
    with pytest.raises(ValueError):
        entry("hopf-hopf", omega1=1.0, omega2=1.0)
    entry("hopf-hopf", omega1=1.0, omega2=math.sqrt(2))


def test_aux_validation():
    with pytest.raises(ValueError):
        entry("pitchfork", s=2)
    with pytest.raises(ValueError):
        entry("bogdanov-takens", k=0.0)
    with pytest.raises(ValueError):
        entry("fold-hopf", omega=0.0)


def test_slow_flow_data_rejects_non_finite():
    with pytest.raises(ValueError):
        SlowFlowData((math.nan,))


def test_slow_dimension_mismatch():
    with pytest.raises(ValueError):
        classify_transition(entry("cusp"), SlowFlowData((1.0,)))


C, NC, IND = Verdict.CRITICAL, Verdict.NOT_CRITICAL, Verdict.INDETERMINATE

# (kind, aux, g, dg2_dy2, j2, expected), one row per branch of every criticality rule
TRUTH_TABLE = [
    ("fold", {}, (1.0,), None, None, C),
    ("fold", {}, (-1.0,), None, None, NC),
    ("fold", {}, (0.0,), None, None, IND),
    ("transcritical", {}, (1.0,), None, None, C),
    ("transcritical", {}, (-1.0,), None, None, C),
    ("transcritical", {}, (0.0,), None, None, IND),
    ("pitchfork", {"s": 1}, (1.0,), None, None, C),
    ("pitchfork", {"s": -1}, (1.0,), None, None, NC),
    ("pitchfork", {"s": 1}, (-1.0,), None, None, NC),
    ("pitchfork", {"s": 1}, (0.0,), None, None, IND),
    ("hopf", {"l1": 1.0}, (1.0,), None, None, C),
    ("hopf", {"l1": -1.0}, (1.0,), None, None, NC),
    ("hopf", {"l1": 0.0}, (1.0,), None, None, IND),
    ("hopf", {"l1": 1.0}, (-1.0,), None, None, NC),
    ("hopf", {"l1": 1.0}, (0.0,), None, None, IND),
    ("cusp", {"s": 1}, (0.0, 0.5), None, None, C),
    ("cusp", {"s": 1}, (0.1, 0.5), None, None, NC),
    ("cusp", {"s": 1}, (0.0, -0.5), None, None, NC),
    ("cusp", {"s": -1}, (0.0, 0.5), None, None, NC),
    ("bautin", {"l2": -1}, (1.0, 1.0), None, None, NC),
    ("bautin", {"l2": 1}, (-1.0, 1.0), None, None, NC),
    ("bautin", {"l2": 1}, (1.0, 0.3), None, None, C),
    ("bautin", {"l2": 1}, (1.0, 0.0), 0.2, None, C),
    ("bautin", {"l2": 1}, (1.0, 0.0), 0.7, None, NC),
    ("bautin", {"l2": 1}, (1.0, 0.0), None, None, IND),
    ("bogdanov-takens", {"s": -1}, (0.0, 0.5), None, None, C),
    ("bogdanov-takens", {"s": -1}, (0.5, 0.0), None, None, NC),
    ("bogdanov-takens", {"s": -1}, (0.0, -0.5), None, None, NC),
    ("bogdanov-takens", {"s": 1}, (0.5, -3.0), None, None, C),
    ("bogdanov-takens", {"s": 1}, (0.0, 0.5), -3.0, None, C),
    ("bogdanov-takens", {"s": 1}, (0.0, 0.5), -1.0, None, NC),
    ("bogdanov-takens", {"s": 1}, (0.0, 0.5), None, None, IND),
    ("bogdanov-takens", {"s": 1}, (-0.5, 0.5), None, None, NC),
    ("bogdanov-takens", {"s": 1}, (0.0, -0.5), None, None, NC),
    ("fold-hopf", {"theta0": 1.0, "s": 1}, (1.0, -1.0), None, None, C),
    ("fold-hopf", {"theta0": 1.0, "s": 1}, (0.0, 1.0), None, None, C),
    ("fold-hopf", {"theta0": 1.0, "s": 1}, (0.0, -1.0), None, None, NC),
    ("fold-hopf", {"theta0": 1.0, "s": 1}, (-1.0, 1.0), None, None, NC),
    ("fold-hopf", {"theta0": 1.0, "s": -1}, (1.0, 0.0), None, 0.5, C),
    ("fold-hopf", {"theta0": 1.0, "s": -1}, (1.0, 1.0), None, 0.5, NC),
    ("fold-hopf", {"theta0": 1.0, "s": -1}, (1.0, 0.0), None, None, IND),
    ("fold-hopf", {"theta0": 1.0, "s": -1}, (-1.0, 0.0), None, 0.5, NC),
    ("fold-hopf", {"theta0": -1.0}, (0.0, 0.5), None, None, C),
    ("fold-hopf", {"theta0": -1.0}, (0.5, 0.0), None, None, NC),
    ("fold-hopf", {"theta0": 0.0}, (1.0, 1.0), None, None, IND),
    ("hopf-hopf", {}, (1.0, 1.0), None, None, IND),
    ("hopf-hopf", {}, (-1.0, 0.0), None, None, IND),
]


@pytest.mark.parametrize("kind,aux,g,d2,j2,expected", TRUTH_TABLE)
def test_truth_table(kind, aux, g, d2, j2, expected):
    verdict, rule = explain_transition(entry(kind, **aux), SlowFlowData(g, d2, j2))
    assert verdict is expected
    assert rule


def test_every_rule_branch_is_enumerated():
    seen = {(k, v) for k, _, _, _, _, v in TRUTH_TABLE}
    for kind in ("fold", "pitchfork", "hopf", "cusp", "bautin", "bogdanov-takens", "fold-hopf"):
        assert (kind, C) in seen and (kind, NC) in seen
    assert ("hopf-hopf", IND) in seen


@pytest.mark.parametrize("kind,aux,g,lemma,table,note", TABLE_DIVERGENCES)
def test_table_divergences_follow_lemma(kind, aux, g, lemma, table, note):
    assert classify_transition(entry(kind, **aux), g) is lemma
    assert note


def test_divergence_list_covers_known_rows():
    kinds = {row[0] for row in TABLE_DIVERGENCES}
    assert kinds == {Kind.CUSP, Kind.BOGDANOV_TAKENS, Kind.FOLD_HOPF}
    assert sum(row[3] is not row[4] for row in TABLE_DIVERGENCES) == 6


slow_values = st.floats(-5, 5, allow_nan=False).map(lambda v: 0.0 if abs(v) < 1e-3 else v)


@settings(max_examples=200, deadline=None)
@given(row=st.sampled_from(TRUTH_TABLE), lam=st.floats(1e-3, 1e3),
       g=st.tuples(slow_values, slow_values), j2=st.one_of(st.none(), slow_values))
def test_classification_invariant_under_positive_scaling(row, lam, g, j2):
    kind, aux, _, d2, _, _ = row
    e = entry(kind, **aux)
    slow = SlowFlowData(g[:e.n], d2, j2)
    assert classify_transition(e, slow) is classify_transition(e, slow.scaled(lam))


@settings(max_examples=100, deadline=None)
@given(kind=st.sampled_from(["fold", "hopf", "pitchfork"]), g=slow_values,
       d2=st.one_of(st.none(), slow_values), j2=st.one_of(st.none(), slow_values))
def test_unused_fields_ignored(kind, g, d2, j2):
    e = entry(kind)
    assert classify_transition(e, SlowFlowData((g,))) is classify_transition(e, SlowFlowData((g,), d2, j2))
