"""Batched univariate root finding (Aberth-Ehrlich with tropical starting points).

Coefficient arrays are ``(m, d+1)`` in increasing degree. Starting moduli
come from the upper Newton polygon of ``(k, log|a_k|)``, which places the
initial guesses on the right scales even when root moduli span many orders
of magnitude (the regime of Log_t sampling at large ``t``).
"""
from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps


def _initial_guesses(coeffs: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    m, d1 = coeffs.shape
    d = d1 - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(coeffs))
    out = np.empty((m, d), dtype=complex)
    offset = 0.4 if rng is None else rng.uniform(0, 2 * np.pi)
    for row in range(m):
        pts = [(k, logs[row, k]) for k in range(d1) if np.isfinite(logs[row, k])]
        hull: list = []
        for p in pts:
            while len(hull) >= 2:
                (x1, y1), (x2, y2) = hull[-2], hull[-1]
                if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append(p)
        col = 0
        for (i, yi), (j, yj) in zip(hull, hull[1:]):
            cnt = j - i
            r = np.exp((yi - yj) / cnt)
            ang = offset + 2 * np.pi * np.arange(cnt) / cnt + 0.1 * i
            out[row, col:col + cnt] = r * np.exp(1j * ang)
            col += cnt
        if col < d:
            out[row, col:] = np.exp(1j * (offset + np.arange(d - col)))
    return out


def _horner(coeffs: np.ndarray, z: np.ndarray):
    """Values and derivatives of each row polynomial at each of its points."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(coeffs.shape[1] - 1, -1, -1):
            dp = dp * z + p
            p = p * z + coeffs[:, k:k + 1]
    return p, dp


def _abs_bound(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros(z.shape)
    az = np.abs(z)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        acc = acc * az + np.abs(coeffs[:, k:k + 1])
    return acc


def batch_roots(coeffs, max_iter: int = 100, tol: float = 4 * _EPS, polish: int = 2) -> np.ndarray:
    """All complex roots of each row of ``coeffs`` (shape ``(m, d+1)``, low degree first).

    Rows must have nonzero leading and constant coefficients. Returns an
    ``(m, d)`` array. Iteration stops per root once the Newton correction is
    below ``tol`` relative to the root, then ``polish`` Newton steps follow.
    """
    a = np.asarray(coeffs, dtype=complex)
    if a.ndim != 2 or a.shape[1] < 2:
        raise ValueError("need a 2-D coefficient array of degree >= 1")
    if np.any(a[:, -1] == 0) or np.any(a[:, 0] == 0):
        raise ValueError("leading and constant coefficients must be nonzero")
    m, d1 = a.shape
    d = d1 - 1
    if d == 1:
        return (-a[:, 0] / a[:, 1])[:, None]
    # normalise each row so the leading coefficient is 1
    a = a / a[:, -1:]
    z = _initial_guesses(a)
    active = np.ones((m, d), dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        p, dp = _horner(a, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, :, None] - z[:, None, :]
            idx = np.arange(d)
            diff[:, idx, idx] = np.inf
            s = np.sum(1.0 / diff, axis=2)
            step = ratio / (1.0 - ratio * s)
        # coincident iterates: nudge them apart instead of stepping
        stuck = ~np.isfinite(step) | (~np.isfinite(s) & active)
        step = np.where(stuck, -1e-3 * z * np.exp(1j * np.arange(d)), step)
        step = np.where(active, step, 0.0)
        # convergence is judged at the iterate where p was evaluated
        newton_small = np.isfinite(ratio) & (np.abs(ratio) <= tol * np.abs(z))
        done = newton_small | (np.abs(p) <= 8 * _EPS * _abs_bound(a, z))
        z = z - np.where(done & ~stuck, 0.0, step)
        active &= ~(done & ~stuck)
    for _ in range(polish):
        p, dp = _horner(a, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        ok = np.isfinite(step)
        z_new = np.where(ok, z - step, z)
        p_new, _ = _horner(a, z_new)
        better = np.abs(p_new) < np.abs(p)
        z = np.where(better, z_new, z)
    return z


def relative_residual(coeffs, z) -> np.ndarray:
    """``|p(z)| / sum_k |a_k z^k|`` for each root in the batch."""
    a = np.asarray(coeffs, dtype=complex)
    p, _ = _horner(a, z)
    return np.abs(p) / _abs_bound(a, z)
