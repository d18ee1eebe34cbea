import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import binary_matrices
from popalign.errors import DataError, InfeasibleError
from popalign.lp import lp_bounds, lp_lower, lp_upper, lp_witness, padded_spectrum
from popalign.oracles import brute_lp
from popalign.spectral import alignment_profile, svd

S = (4.0, 1.0, 0.0)


def test_lower_examples():
    assert lp_lower(S, 2.0, 1) == pytest.approx(2 / 3, abs=1e-12)
    assert lp_lower(S, 1.0, 1) == 0.0
    assert lp_lower((12.0, 0.0, 0.0), 12.0, 1) == 1.0


def test_upper_examples():
    assert lp_upper(S, 0.5, 1) == pytest.approx(1.0, abs=1e-12)
    assert lp_upper((5.0, 3.0, 0.0), 2.0, 2) == pytest.approx(1.0, abs=1e-12)
    assert lp_upper((5.0, 3.0, 1.0), 4.0, 2) == 1.0
    assert lp_upper((5.0, 3.0, 1.0), 2.0, 2) == pytest.approx(3 / 2 * 1 / 2, abs=1e-12)


def test_witness_examples():
    lo = lp_witness(S, 2.0, 1, "lower")
    assert lo.weights == pytest.approx({0: 1 / 3, 1: 2 / 3})
    assert lo.objective == pytest.approx(4 / 3) and lo.kappa == pytest.approx(2 / 3)
    up = lp_witness(S, 2.0, 1, "upper")
    assert up.weights == pytest.approx({0: 0.5, 2: 0.5})
    assert up.objective == pytest.approx(2.0) and up.kappa == pytest.approx(1.0)
    assert lp_witness(S, 1.0, 1, "lower").weights == {1: 1.0}


def test_flat_spectrum_lower_is_zero():
    # any mass split among equal values is feasible, including all mass off the head
    s = (2.0, 2.0, 2.0)
    assert lp_lower(s, 2.0, 1) == 0.0
    assert brute_lp(s, 2.0, 1)[0] == 0.0
    assert lp_bounds(s, 2.0, 1).degenerate


def test_infeasible_mu():
    with pytest.raises(InfeasibleError):
        lp_lower(S, 5.0, 1)
    with pytest.raises(DataError):
        lp_lower((1.0, 2.0), 1.5, 1)
    with pytest.raises(DataError):
        lp_lower(S, 2.0, 3)


def _random_spectrum(rng):
    length = int(rng.integers(2, 11))
    s = np.sort(rng.integers(0, 6, size=length).astype(float) if rng.random() < 0.3
                else rng.random(length) * 10)[::-1]
    grid = np.unique(np.concatenate([s, rng.uniform(s[-1], s[0], size=4)]))
    return s, [mu for mu in grid if mu > 0]


@pytest.mark.parametrize("seed", range(100))
def test_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    s, mus = _random_spectrum(rng)
    for mu in mus:
        for k in range(1, len(s)):
            lo, hi = brute_lp(s, mu, k)
            assert lp_lower(s, mu, k) == pytest.approx(lo, abs=1e-9)
            assert lp_upper(s, mu, k) == pytest.approx(hi, abs=1e-9)
            for side, target in (("lower", lo), ("upper", hi)):
                w = lp_witness(s, mu, k, side)
                a = w.dense(len(s))
                assert len(w.weights) <= 2
                assert np.all(a >= 0) and a.sum() == pytest.approx(1.0, abs=1e-9)
                assert a @ s == pytest.approx(mu, abs=1e-9)
                assert w.kappa == pytest.approx(target, abs=1e-9)


@st.composite
def spectra(draw):
    head = draw(st.floats(1, 100))
    rest = draw(st.lists(st.floats(0, 1), min_size=1, max_size=9))
    s = np.sort(np.array([head] + [head * x for x in rest]))[::-1]
    mu = draw(st.floats(max(s[-1], 1e-3), s[0]))
    return s, mu


@given(spectra())
def test_lower_monotone_in_k(sm):
    s, mu = sm
    vals = [lp_lower(s, mu, k) for k in range(1, len(s))]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(lp_lower(s, mu, k) <= lp_upper(s, mu, k) + 1e-12 for k in range(1, len(s)))


@given(spectra())
def test_k1_gap_formula(sm):
    s, mu = sm
    expected = s[0] * (mu - s[1]) / (mu * (s[0] - s[1])) if mu > s[1] else 0.0
    assert lp_lower(s, mu, 1) == pytest.approx(min(1.0, expected), abs=1e-9)


@given(binary_matrices(max_n=10, max_m=10))
def test_sandwich_on_graphs(Y):
    D = svd(Y)
    prof = alignment_profile(Y, D)
    s = padded_spectrum(D.sigma_sq, Y.n)
    for k in range(1, min(D.effective_rank, Y.n - 1) + 1):
        kappa = prof.kappa[k - 1]
        assert lp_lower(s, prof.mu_ratio, k) <= kappa + 1e-9
        assert lp_upper(s, prof.mu_ratio, k) >= kappa - 1e-9


def test_padded_spectrum():
    assert padded_spectrum([3.0, 1.0], 4).tolist() == [3.0, 1.0, 0.0, 0.0]
    assert padded_spectrum([3.0, 1.0, 0.5], 2).tolist() == [3.0, 1.0]
