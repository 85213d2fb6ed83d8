"""Pure-Python (numpy) SMO core, used when the compiled extension is absent.

Mirrors `_smo.pyx` operation for operation so both backends produce the
same iterates to float precision.
"""

from __future__ import annotations

import numpy as np

_ETA_FLOOR = 1e-12


def smo_solve(K: np.ndarray, y: np.ndarray, C: float, tol: float,
              max_iter: int) -> tuple[np.ndarray, float, int, float]:
    """Minimize 0.5*a'Qa - e'a s.t. 0 <= a <= C, y'a = 0 with Q = yy' * K.

    Returns (alpha, bias, n_iter, gap).
    """
    n = y.size
    alpha = np.zeros(n)
    grad = -np.ones(n)
    gap = 0.0
    n_iter = 0

    for _ in range(max_iter):
        ng = -y * grad
        in_up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        in_low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not in_up.any() or not in_low.any():
            break
        up_vals = np.where(in_up, ng, -np.inf)
        low_vals = np.where(in_low, ng, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        gap = up_vals[i] - low_vals[j]
        if gap <= tol:
            break

        eta = max(K[i, i] + K[j, j] - 2.0 * K[i, j], _ETA_FLOOR)
        lam = gap / eta
        lam = min(lam, (C - alpha[i]) if y[i] > 0 else alpha[i])
        lam = min(lam, alpha[j] if y[j] > 0 else (C - alpha[j]))

        alpha[i] = min(max(alpha[i] + y[i] * lam, 0.0), C)
        alpha[j] = min(max(alpha[j] - y[j] * lam, 0.0), C)
        grad += lam * y * (K[:, i] - K[:, j])
        n_iter += 1

    free = (alpha > 0.0) & (alpha < C)
    if free.any():
        bias = float(np.mean(-y[free] * grad[free]))
    else:
        ng = -y * grad
        in_up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        in_low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        gmax = float(np.max(np.where(in_up, ng, -np.inf)))
        gmin = float(np.min(np.where(in_low, ng, np.inf)))
        bias = (gmax + gmin) / 2.0

    return alpha, float(bias), n_iter, float(gap)
