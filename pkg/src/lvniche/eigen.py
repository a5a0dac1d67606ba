"""Eigenvalues of small real matrices.

Up to 3x3 the characteristic polynomial is solved in closed form; larger
matrices fall back to LAPACK through numpy.
"""

from __future__ import annotations

import math

import numpy as np


def _quadratic(b: float, c: float) -> np.ndarray:
    # roots of x^2 + b x + c
    disc = b * b - 4.0 * c
    if disc >= 0:
        s = math.sqrt(disc)
        # avoid cancellation: compute the larger-magnitude root first
        q = -0.5 * (b + math.copysign(s, b))
        if q == 0.0:
            return np.array([0.0, 0.0], dtype=complex)
        return np.array([q, c / q], dtype=complex)
    s = math.sqrt(-disc)
    return np.array([complex(-b / 2, s / 2), complex(-b / 2, -s / 2)])


def _polish(coeffs: tuple[float, float, float], x: complex) -> complex:
    a, b, c = coeffs

    def f(z: complex) -> complex:
        return ((z + a) * z + b) * z + c

    fx = f(x)
    for _ in range(3):
        df = (3.0 * x + 2.0 * a) * x + b
        if df == 0:
            break
        y = x - fx / df
        fy = f(y)
        # Newton is unreliable next to a multiple root; keep only improvements
        if abs(fy) >= abs(fx):
            break
        x, fx = y, fy
    return x


def _cubic(a: float, b: float, c: float) -> np.ndarray:
    # roots of x^3 + a x^2 + b x + c via the depressed cubic t^3 + p t + q
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    D = (q / 2.0) ** 2 + (p / 3.0) ** 3
    m = 2.0 * math.sqrt(-p / 3.0) if p < 0 else 0.0
    if D > 0 or p * m == 0.0:
        # p >= 0 with D <= 0, or p * m == 0 with p < 0, only arise through underflow
        sD = math.sqrt(max(D, 0.0))
        u = np.cbrt(-q / 2.0 + sD)
        v = np.cbrt(-q / 2.0 - sD)
        re = -(u + v) / 2.0
        im = math.sqrt(3.0) / 2.0 * (u - v)
        roots = [complex(u + v), complex(re, im), complex(re, -im)]
    else:
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [complex(m * math.cos(theta - 2.0 * math.pi * k / 3.0)) for k in range(3)]
    out = []
    for t in roots:
        x = _polish((a, b, c), t - shift)
        if t.imag == 0.0:
            x = complex(x.real, 0.0)
        out.append(x)
    return np.array(out)


def eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a square real matrix, sorted by descending real part."""
    A = np.asarray(M, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if n == 0:
        return np.array([], dtype=complex)
    if n == 1:
        ev = np.array([complex(A[0, 0])])
    elif n == 2:
        ev = _quadratic(-np.trace(A), A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    elif n == 3:
        tr = np.trace(A)
        minors = (
            A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
            + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
            + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]
        )
        det = (
            A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
            - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
            + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
        )
        ev = _cubic(-tr, minors, -det)
    else:
        ev = np.linalg.eigvals(A).astype(complex)
    return ev[np.lexsort((-ev.imag, -ev.real))]
