import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ciresolve import (
    ModulePresentation,
    RingTower,
    Undetermined,
    WindowTooShort,
    check_growth_step,
    classify_ring,
    complexity,
    fit_growth,
    iterate_tower,
    koszul_complex,
    mapping_cone,
    minimize,
    residue_betti,
    verify_zci_to_gci,
)
from ciresolve.growth import default_window, dual_residue_homology, poincare_series, witness_polynomial

from .helpers import SHIPPED, load, poincare_coefficients


def test_constant_linear_and_bounded_sequences():
    assert fit_growth([1] * 12) == 0
    assert fit_growth(list(range(1, 13))) == 1
    assert fit_growth([1, 2, 1] + [0] * 9) == -1


def test_short_window_is_rejected():
    with pytest.raises(WindowTooShort):
        fit_growth([1] * 8)
    with pytest.raises(WindowTooShort):
        fit_growth([1] * 20, window=(10, 13))
    assert fit_growth([1] * 20, window=(10, 14)) == 0


def test_exponential_growth_is_undetermined():
    with pytest.raises(Undetermined):
        fit_growth([2**i for i in range(14)])


def test_alternating_sequences_use_parity_fits():
    assert fit_growth([1, 2] * 7) == 0
    assert fit_growth([v for i in range(10) for v in (i, 5)]) == 1


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 3),
    st.lists(st.integers(-5, 5), min_size=4, max_size=4),
    st.integers(1, 9),
    st.integers(0, 6),
)
def test_polynomial_sequences_recover_their_degree(d, coeffs, lead, offset):
    coeffs = coeffs[:d] + [lead]
    beta = [sum(cf * (i + offset) ** k for k, cf in enumerate(coeffs)) for i in range(16)]
    assert fit_growth(beta) == d
    # growth is unchanged by shifting the index
    assert fit_growth(beta[1:]) == d


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=12, max_size=20), st.integers(0, 2))
def test_witness_polynomial_bounds_the_sequence(prefix, d):
    tail_start = len(prefix)
    beta = prefix + [(i + 1) ** d for i in range(tail_start, tail_start + 12)]
    coeffs = witness_polynomial(beta, d)
    assert len(coeffs) == d + 1
    assert all(b <= sum(c * i**k for k, c in enumerate(coeffs)) for i, b in enumerate(beta))


def test_default_window():
    assert default_window(13) == (6, 12)
    assert default_window(12) == (6, 11)


@pytest.mark.parametrize("n,c", [(1, 1), (2, 0), (2, 1), (2, 2), (3, 3), (4, 2)])
def test_poincare_series_matches_sympy(n, c):
    assert poincare_series(n, c, 15) == poincare_coefficients(n, c, 15)


@pytest.mark.parametrize(
    "name,expected",
    [("regular_xyz.json", 0), ("hypersurface_x3_y3.json", 1), ("ci_x2_y2.json", 2), ("module_mf_x2_plus_y2.json", 1)],
)
def test_complexity(name, expected):
    problem = load(name)
    assert complexity(problem.tower, problem.module, 12) == expected


def test_complexity_of_free_module_is_zero():
    t = RingTower(5, ["x", "y"], ["x^2", "y^2"])
    assert complexity(t, ModulePresentation.free(t), 10) == 0


@pytest.mark.parametrize(
    "variables,relations,p,label,codim",
    [
        (["x", "y"], [], 5, "regular", 0),
        (["x", "y"], ["x^3 + y^3"], 7, "hypersurface", 1),
        (["x", "y"], ["x^2", "y^2"], 5, "complete-intersection", 2),
    ],
)
def test_classification(variables, relations, p, label, codim):
    report = classify_ring(RingTower(p, variables, relations), 12)
    assert report.label == label
    assert report.codimension == codim
    assert report.codim_matches
    assert report.oracle_agrees and report.poincare_agrees
    assert report.passed
    if label == "hypersurface":
        assert report.periodic_tail is not None


def test_classification_report_serializes():
    report = classify_ring(RingTower(5, ["x", "y"], ["x^2", "y^2"]), 10)
    data = report.to_json()
    assert data["label"] == "complete-intersection"
    assert data["betti"] == list(range(1, 12))
    assert "codim 2" in report.describe()


def test_growth_step_for_dual_numbers():
    t = RingTower(5, ["x"], ["x^2"])
    N = 14
    result = iterate_tower(t, None, N, certify=False)
    G = result.resolutions[-1].complex
    hX = [sum(residue_betti(G)[i].values()) for i in range(N + 1)]
    cone = minimize(mapping_cone(result.operators[0]))
    table = residue_betti(cone)
    # the cone starts at index -1; drop the two indices touched by truncation
    hY = [sum(table.get(i, {}).values()) for i in range(cone.lo, N - 2)] + [0, 0]
    assert hY == [1, 1] + [0] * (N - 1)
    assert fit_growth(hY) == -1
    assert fit_growth(hX) == 0
    assert check_growth_step(hX, hY, 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=14, max_size=14), st.integers(1, 4))
def test_growth_step_is_reflexive(h, n):
    h = h[:7] + [3] * 7
    assert check_growth_step(h, h, n)


def test_growth_step_detects_coefficient_violation():
    hY = [1] + [0] * 11
    assert not check_growth_step([1] * 12, hY, 1)
    assert check_growth_step([1, 0] * 6, hY, 1)
    with pytest.raises(ValueError):
        check_growth_step([1], [1], 0)


def test_dual_residue_homology_of_koszul():
    t = RingTower(5, ["x", "y"])
    k = koszul_complex(t, 0, [t.var("x"), t.var("y")])
    assert dual_residue_homology(k) == {0: 1, -1: 2, -2: 1}


@pytest.mark.parametrize("name", [n for n in SHIPPED if not n.startswith("module")])
def test_zci_to_gci(name):
    problem = load(name)
    c = problem.tower.c
    report = verify_zci_to_gci(problem.tower, 12)
    assert report.passed
    assert report.growth[1] == -1
    assert report.growth[c + 1] == c - 1
    for i in range(2, c + 2):
        assert report.growth[i] <= report.growth[i - 1] + 1
