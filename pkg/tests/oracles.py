"""Independent scalar oracle: classical formulas on probability vectors only.

Everything here is written directly from the classical definitions and never
touches a matrix, so it can certify the quantum code paths on commuting
(diagonal) inputs.  The Augustin minimization is done by multi-start BFGS on
a softmax parametrization with an analytic gradient, plus a coarse simplex
grid search as a second, cruder check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize, minimize_scalar

INF = float("inf")


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    pos = p[p > 0]
    return float(-(pos * np.log(pos)).sum())


def renyi_entropy(p, a: float) -> float:
    p = np.asarray(p, dtype=float)
    pos = p[p > 0]
    return float(np.log((pos**a).sum()) / (1.0 - a))


def kl(q, p) -> float:
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any((q > 0) & (p <= 0)):
        return INF
    m = q > 0
    return float((q[m] * np.log(q[m] / p[m])).sum())


def renyi_div(q, p, a: float) -> float:
    """Classical Renyi divergence (1/(a-1)) log sum q^a p^(1-a)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if a > 1 and np.any((q > 0) & (p <= 0)):
        return INF
    m = (q > 0) & (p > 0)
    if not m.any():
        return INF
    s = float((q[m] ** a * p[m] ** (1.0 - a)).sum())
    return math.log(s) / (a - 1.0)


def mutual_info(p, W) -> float:
    """I(X;Y) for prior p and channel rows W[x]."""
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    m = p @ W
    return entropy(m) - float(sum(px * entropy(wx) for px, wx in zip(p, W) if px > 0))


def augustin_objective(p, W, a: float, s) -> float:
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    return float(
        sum(px * renyi_div(wx, s, a) for px, wx in zip(p, W) if px > 0)
    )


def _softmax(theta):
    z = np.exp(theta - theta.max())
    return z / z.sum()


def _objective_and_grad(theta, p, W, a):
    s = _softmax(theta)
    val = 0.0
    dF_ds = np.zeros_like(s)
    for px, wx in zip(p, W):
        if px <= 0:
            continue
        qx = float((wx**a * s ** (1.0 - a)).sum())
        val += px * math.log(qx) / (a - 1.0)
        dF_ds += -px * (wx**a) * s ** (-a) / qx
    inner = float((dF_ds * s).sum())
    grad = s * (dF_ds - inner)
    return val, grad


def augustin(p, W, a: float, restarts: int = 5, seed: int = 0) -> float:
    """Classical Augustin information: min over s of sum_x p(x) D_a(W_x || s)."""
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    d = W.shape[1]
    rng = np.random.default_rng(seed)
    best = INF
    for r in range(restarts):
        theta0 = np.zeros(d) if r == 0 else rng.normal(scale=1.0, size=d)
        res = minimize(
            _objective_and_grad,
            theta0,
            args=(p, W, a),
            jac=True,
            method="BFGS",
            options={"gtol": 1e-12, "maxiter": 2000},
        )
        best = min(best, float(res.fun))
    return best


def augustin_grid(p, W, a: float, step: float = 1e-3) -> float:
    """Brute-force grid search over the simplex (output dim 2 or 3 only)."""
    W = np.asarray(W, dtype=float)
    d = W.shape[1]
    best = INF
    grid = np.arange(step, 1.0, step)
    if d == 2:
        for s0 in grid:
            best = min(best, augustin_objective(p, W, a, np.array([s0, 1 - s0])))
    elif d == 3:
        for s0 in grid:
            for s1 in np.arange(step, 1.0 - s0, step):
                s = np.array([s0, s1, 1.0 - s0 - s1])
                if s[2] <= 0:
                    continue
                best = min(best, augustin_objective(p, W, a, s))
    else:
        raise ValueError("grid oracle supports output dimension 2 or 3 only")
    return best


def arimoto_conditional(p, W, a: float) -> float:
    """Classical sandwiched conditional Renyi entropy H*_a(X|Y), closed form.

    (a/(1-a)) log sum_y ( sum_x p(x)^a W(y|x)^a )^(1/a).
    """
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    inner = ((p[:, None] * W) ** a).sum(axis=0)
    return float(a / (1.0 - a) * math.log((inner ** (1.0 / a)).sum()))


def conditional_petz_down(p, W, a: float) -> float:
    """Classical H_down_a(X|Y) = -D_a(joint || 1 x marginal)."""
    p = np.asarray(p, dtype=float)
    W = np.asarray(W, dtype=float)
    joint = p[:, None] * W
    marg = joint.sum(axis=0)
    mask = joint > 0
    s = float((joint[mask] ** a * np.broadcast_to(marg, joint.shape)[mask] ** (1.0 - a)).sum())
    return -math.log(s) / (a - 1.0)


def sup_alpha(fn, lo: float, hi: float, margin: float = 1e-4, grid_points: int = 600) -> tuple[float, float]:
    """Independent sup evaluator: dense grid plus bounded scalar refinement."""
    alphas = np.linspace(lo + margin, hi - margin, grid_points)
    vals = np.array([fn(a) for a in alphas])
    i = int(np.argmax(vals))
    blo, bhi = alphas[max(i - 1, 0)], alphas[min(i + 1, len(alphas) - 1)]
    res = minimize_scalar(
        lambda a: -fn(a), bounds=(blo, bhi), method="bounded",
        options={"xatol": 1e-10},
    )
    if -res.fun > vals[i]:
        return float(res.x), float(-res.fun)
    return float(alphas[i]), float(vals[i])
