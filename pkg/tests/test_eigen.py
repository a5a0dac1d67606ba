import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lvniche.eigen import eigenvalues


def max_mismatch(a, b):
    return min(np.max(np.abs(np.asarray(a)[list(p)] - b)) for p in itertools.permutations(range(len(a))))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: arrays(float, (n, n), elements=st.floats(-50, 50))))
def test_closed_form_matches_lapack(A):
    got = eigenvalues(A)
    scale = max(1.0, np.max(np.abs(A)))
    # repeated roots are only determined to ~sqrt(eps) (cube root for triples)
    assert max_mismatch(got, np.linalg.eigvals(A)) <= 2e-5 * scale
    assert np.sum(got) == pytest.approx(np.trace(A), abs=1e-9 * scale * len(A))


@pytest.mark.parametrize(
    "A, expected",
    [
        ([[2.0]], [2.0]),
        ([[0.0, 1.0], [-1.0, 0.0]], [1j, -1j]),
        ([[3.0, 0, 0], [0, -1.0, 0], [0, 0, 2.0]], [3.0, 2.0, -1.0]),
        ([[2.0, 1, 0], [0, 2.0, 1], [0, 0, 2.0]], [2.0, 2.0, 2.0]),
        ([[0, 0, 1.0], [1.0, 0, 0], [0, 1.0, 0]], [1.0, -0.5 + np.sqrt(3) / 2 * 1j, -0.5 - np.sqrt(3) / 2 * 1j]),
    ],
)
def test_known(A, expected):
    assert max_mismatch(eigenvalues(A), np.array(expected, dtype=complex)) <= 1e-12


def test_large_uses_general_method():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(6, 6))
    assert max_mismatch(eigenvalues(A), np.linalg.eigvals(A)) <= 1e-12


def test_sorted_by_real_part():
    ev = eigenvalues([[1.0, 0, 0], [0, -3.0, 0], [0, 0, 0.5]])
    assert ev.real == pytest.approx([1.0, 0.5, -3.0], abs=1e-14)
