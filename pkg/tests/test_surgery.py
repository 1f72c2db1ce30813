import numpy as np
import pytest

from conftest import knot
from diagram import RoleError
from kirby import make_standard_rbg
from surgery import LinkingMatrix, linking_matrix, smith_normal_form, surgery_h1, validate_rbg


@pytest.mark.parametrize("rows, factors", [
    ([[0]], (0,)),
    ([[2, 0], [0, 3]], (1, 6)),
    ([[1, 1], [1, 1]], (1, 0)),
    ([[2, 4], [4, 8]], (2, 0)),
])
def test_smith_normal_form(rows, factors):
    assert smith_normal_form(rows).factors == factors


def test_smith_normal_form_accepts_numpy():
    invariants = smith_normal_form(np.array([[4, 0], [0, 6]]))
    assert invariants.torsion == (2, 12)
    assert invariants.rank == 0
    assert str(invariants) == "Z/2 + Z/12"


def test_zero_framed_unknot_has_infinite_cyclic_h1():
    assert surgery_h1(knot("unknot")).is_infinite_cyclic()
    assert str(surgery_h1(knot("3_1_right"))) == "Z"


def test_hopf_link_matrix(hopf):
    lm = linking_matrix(hopf.with_framings([2, 3]))
    assert lm.entries == ((2, 1), (1, 3))
    assert lm.is_symmetric()
    assert lm.det() == 5
    assert surgery_h1(hopf).factors == (1, 1)


def test_unimodular_change_of_basis_keeps_smith_form():
    rng = np.random.default_rng(3)
    base = LinkingMatrix.from_rows([[3, 1, 0], [1, 0, 2], [0, 2, -1]])
    before = smith_normal_form(base)
    for _ in range(20):
        p = np.eye(3, dtype=int)
        i, j = rng.choice(3, size=2, replace=False)
        p[i, j] = int(rng.integers(-3, 4))
        moved = p @ base.to_numpy().astype(int) @ p.T
        assert smith_normal_form(moved) == before


def _unimodular(rng, n):
    m = np.eye(n, dtype=np.int64)
    for _ in range(3):
        i, j = rng.choice(n, size=2, replace=False)
        m[i] += int(rng.integers(-2, 3)) * m[j]
    return m


@pytest.mark.slow
def test_smith_form_of_random_matrices():
    rng = np.random.default_rng(11)
    for trial in range(1000):
        n = int(rng.integers(3, 7))
        m = rng.integers(-5, 6, size=(n, n))
        invariants = smith_normal_form(m)
        factors = invariants.factors
        assert len(factors) == n
        nonzero = [f for f in factors if f]
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:])), trial
        det = LinkingMatrix.from_rows(m).det()
        if det:
            assert invariants.rank == 0
            assert int(np.prod(factors, dtype=object)) == abs(det), trial
        else:
            assert invariants.rank >= 1
        moved = _unimodular(rng, n) @ m @ _unimodular(rng, n)
        assert smith_normal_form(moved) == invariants, trial


def test_after_slide_is_a_congruence():
    base = LinkingMatrix.from_rows([[2, 1, 0], [1, -1, 3], [0, 3, 0]])
    slid = base.after_slide(0, 2, -1)
    assert slid.entries == ((2, -2, 0), (-2, -1, 3), (0, 3, 0))
    assert slid.is_symmetric()
    assert slid.det() == base.det()
    assert smith_normal_form(slid) == smith_normal_form(base)
    assert base.after_slide(1, 0).entries[1][1] == 3


def _tangles(ell: int):
    """Clasp patterns with total sign ell: the plain one, split between B and G, and padded with cancelling pairs."""
    plain = [1 if ell > 0 else -1] * abs(ell)
    yield plain, []
    yield [], plain
    yield plain[:1], plain[1:]
    yield plain[1:], plain[:1]
    yield plain + [1, -1], []
    yield [1, -1] + plain, []
    yield plain, [1, -1]
    yield plain, [-1, 1]
    yield [1] + plain, [-1]
    yield plain + [-1], [1]


@pytest.mark.slow
@pytest.mark.parametrize("r", range(-7, 8))
@pytest.mark.parametrize("ell", range(-3, 4))
def test_standard_rbg_linking_law(r, ell):
    for b_tangle, g_tangle in _tangles(ell):
        link = make_standard_rbg(r, ell, b_tangle, g_tangle)
        lm = linking_matrix(link)
        assert lm.is_symmetric()
        assert lm.det() == ell * (2 - r * ell)
        report = validate_rbg(link)
        assert report.ell == ell
        assert report.r == r
        assert report.is_special == (ell * (2 - r * ell) == 0)


def test_trivial_rbg_is_special_and_small():
    report = validate_rbg(make_standard_rbg(3, 0))
    assert report.is_special and report.is_small
    assert report.ell == 0
    assert report.h1 == "Z"
    assert report.to_json()["failures"] == []


def test_nonzero_meridian_framing_fails():
    link = make_standard_rbg(0, 0)
    framings = list(link.framings)
    framings[link.role("B")] = 1
    report = validate_rbg(link.with_framings(framings))
    assert not report.is_special
    assert "b≠0" in report.failures


def test_validate_needs_roles(hopf):
    with pytest.raises(RoleError):
        validate_rbg(hopf)
