import itertools

import pytest

from ciresolve import (
    LiftFailed,
    ModulePresentation,
    RingTower,
    detect_periodic_tail,
    higher_homotopies,
    homology_dims,
    iterate_tower,
    koszul_complex,
    koszul_cone,
    mapping_cone,
    minimal_free_resolution,
    minimize,
    spliced_resolution,
    suspend,
    tensor_down,
    verify_complex,
)
from ciresolve.construct import direct_splice

from .helpers import SHIPPED, load, poincare_coefficients


def dual_numbers():
    return RingTower(5, ["x"], ["x^2"])


def codim2():
    return RingTower(5, ["x", "y"], ["x^2", "y^2"])


def add_entries(acc, m):
    for key, f in m.entries.items():
        acc[key] = acc[key] + f if key in acc else f
    return {k: v for k, v in acc.items() if not v.is_zero()}


def test_tensor_down_of_koszul_resolution():
    t = dual_numbers()
    F = koszul_complex(t, 0, [t.var("x")])
    down = tensor_down(F, 1)
    assert down.level == 1
    assert down.modules == [(0,), (1,)]
    assert down.d(1).entries == {(0, 0): t.var("x")}
    assert homology_dims(down, 0, (0, 3)) == [1, 0, 0, 0]
    assert homology_dims(down, 1, (0, 3)) == [0, 0, 1, 0]


def test_tensor_down_of_zero_and_reduced_complexes():
    t = dual_numbers()
    zero = koszul_complex(t, 0, [])
    assert tensor_down(zero, 1).modules == [(0,)]
    q = RingTower(5, ["x", "y"], ["x^2"])
    F = koszul_complex(q, 0, [q.var("y")])
    assert tensor_down(F, 1).d(1).entries == F.d(1).entries


@pytest.mark.parametrize("name", SHIPPED)
def test_higher_homotopy_identities(name):
    problem = load(name)
    t = problem.tower
    result = iterate_tower(t, problem.module, 6, certify=False)
    F, sigma = result.homotopies["F"], result.homotopies["sigma"]
    c = t.c

    def get(a, i):
        if not any(a):
            return F.d(i) if F.lo < i <= F.hi else None
        return sigma.get(a, {}).get(i)

    for a in sigma:
        total = sum(a)
        for i in F.indices():
            acc = {}
            for b in itertools.product(*(range(x + 1) for x in a)):
                rest = tuple(x - y for x, y in zip(a, b))
                first = get(rest, i)
                if first is None:
                    continue
                second = get(b, i + 2 * sum(rest) - 1)
                if second is None:
                    continue
                acc = add_entries(acc, second @ first)
            if total == 1:
                j = a.index(1)
                f = t.relations[j]
                expected = {(r, r): f for r in range(F.rank(i))}
                assert acc == expected, (a, i)
            else:
                assert acc == {}, (a, i)
    assert all(len(a) == c for a in sigma)


def test_homotopy_lift_fails_without_room():
    t = RingTower(5, ["x"], ["x^2"])
    F = minimal_free_resolution(t, 0, ModulePresentation.free(t, (0,), level=0), 2).complex
    with pytest.raises(LiftFailed):
        higher_homotopies(F, [t.var("x")])


def test_splice_over_dual_numbers():
    t = dual_numbers()
    result = iterate_tower(t, None, 10, certify=False)
    G = result.resolutions[-1].complex
    assert G.modules == [(i,) for i in range(11)]
    for i in range(1, 11):
        assert G.d(i).entries == {(0, 0): t.var("x")}
    chi = result.operators[0]
    assert chi.verify()
    for i in range(2, 11):
        assert chi.component(i).entries == {(0, 0): t.one()}
    tail = spliced_resolution(t, None, 10).tail
    assert tail is not None and tail.start == 0 and tail.shift == 2


def test_splice_over_sum_of_squares():
    t = RingTower(5, ["x", "y"], ["x^2 + y^2"])
    res = spliced_resolution(t, None, 10)
    assert res.total_betti() == [1] + [2] * 10
    assert res.total_betti() == poincare_coefficients(2, 1, 11)
    oracle = minimal_free_resolution(t, 1, ModulePresentation.residue_field(t), 10)
    assert res.betti() == oracle.betti()


def test_free_module_minimizes_to_itself():
    t = dual_numbers()
    res = spliced_resolution(t, ModulePresentation.free(t), 8)
    assert res.complex.modules[0] == (0,)
    assert res.total_betti() == [1] + [0] * (len(res.complex.modules) - 1)


@pytest.mark.parametrize("name", SHIPPED)
def test_splice_is_exact_and_operators_are_chain_maps(name):
    problem = load(name)
    t = problem.tower
    N = 7
    result = iterate_tower(t, problem.module, N, certify=False)
    for res in result.resolutions:
        G = res.complex
        assert verify_complex(G)[0]
        assert G.is_homogeneous()
    G = result.resolutions[-1].complex
    top = 10
    assert homology_dims(G, 0, (0, top)) == homology_dims(minimal_free_resolution(t, t.c, problem.module, 1).complex, 0, (0, top))
    for i in range(1, N):
        assert not any(homology_dims(G, i, (0, top))), i
    assert result.operators.verify()
    assert result.operators.commute()
    for chi in result.splice_operators:
        assert chi.verify()


@pytest.mark.parametrize("name", ["ci_x2_y2.json", "ci_x2_y2_z2.json"])
def test_direct_splice_matches_iterated_splice(name):
    problem = load(name)
    t = problem.tower
    N = 6
    result = iterate_tower(t, problem.module, N, certify=False)
    F, sigma = result.homotopies["F"], result.homotopies["sigma"]
    direct, _ = direct_splice(F, sigma, list(t.relation_degrees), t.c, N, t.c)
    G = result.resolutions[-1].complex
    assert direct.modules == G.modules
    for i in range(1, N + 1):
        assert direct.d(i).entries == G.d(i).entries


def test_single_relation_matches_one_cone():
    t = RingTower(7, ["x", "y"], ["x^3 + y^3"])
    result = iterate_tower(t, None, 8)
    chi_splice = result.splice_operators[0]
    chi = result.operators[0]
    for i in range(2, 9):
        assert chi.component(i).entries == chi_splice.component(i).entries
    cone = mapping_cone(chi_splice)
    assert cone.modules == result.cone.modules
    assert all(cone.d(i).entries == result.cone.d(i).entries for i in cone.indices())
    assert result.certificate.passed


def test_regular_ring_cone_is_the_resolution():
    problem = load("regular_xyz.json")
    result = iterate_tower(problem.tower, problem.module, 6)
    assert result.cone is result.resolutions[0].complex
    assert result.cone.ranks() == [1, 3, 3, 1]
    assert len(result.operators) == 0
    assert result.certificate.passed


def test_order_independence_all_permutations():
    t = RingTower(5, ["x", "y", "z"], ["x^2", "y^2", "z^2"])
    N = 6
    base = iterate_tower(t, None, N)
    window = base.certificate.degrees
    lo, hi = base.certificate.indices
    tables = []
    for order in itertools.permutations(range(3)):
        cone = iterate_tower(t, None, N, order=order, certify=False).cone
        tables.append({i: homology_dims(cone, i, window) for i in range(lo, hi + 1)})
    assert all(tab == tables[0] for tab in tables)
    assert tables[0] == base.certificate.subject_dims


def test_koszul_cone_with_no_operators():
    t = codim2()
    G = iterate_tower(t, None, 4, certify=False).resolutions[-1].complex
    assert koszul_cone(G, []) is G


def test_iterated_cone_is_small():
    t = codim2()
    result = iterate_tower(t, None, 8)
    assert result.certificate.passed
    m = minimize(result.cone)
    lo, hi = result.certificate.indices
    support = [i for i in range(lo, hi + 1) if m.rank(i)]
    assert support and max(support) - min(support) <= t.n


@pytest.mark.parametrize(
    "name,expected",
    [("hypersurface_x2.json", (0, 2)), ("hypersurface_x3_y3.json", (1, 3))],
)
def test_periodic_tail_detection(name, expected):
    problem = load(name)
    res = spliced_resolution(problem.tower, problem.module, 12)
    tail = detect_periodic_tail(res)
    assert tail is not None
    assert (tail.start, tail.shift) == expected
    G = res.complex
    for i in range(tail.start, G.hi - 1):
        assert G.module(i + 2) == tuple(g + tail.shift for g in G.module(i))


def test_no_periodic_tail_when_betti_grow_or_stop():
    assert detect_periodic_tail(spliced_resolution(codim2(), None, 10)) is None
    regular = load("regular_xyz.json")
    assert detect_periodic_tail(spliced_resolution(regular.tower, None, 10)) is None


def test_suspended_witness_matches_single_cone_over_dual_numbers():
    t = dual_numbers()
    result = iterate_tower(t, None, 10, certify=False)
    fbar = result.fbars[0]
    cone = mapping_cone(result.splice_operators[0])
    witness = suspend(fbar, -1, -2)
    for i in range(-1, 9):
        assert homology_dims(cone, i, (-2, 12)) == homology_dims(witness, i, (-2, 12))
