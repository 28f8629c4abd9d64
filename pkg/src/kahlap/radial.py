"""Univariate radial-reduction oracle.

For a one-variable metric with potential f(t), t = |z|^2, everything
reduces to univariate series calculus:

    metric profile   g(t)   = f'(t) + t f''(t)
    Laplacian        L psi  = (1/g) * (psi' + t psi'')

This is a deliberately separate code path from the multivariate engine (no
jets, no matrices); the two must agree exactly on Lap^k(t^m)(0), which is
the anti-hallucination check behind all one-variable reference values used
in the tests.
"""

from __future__ import annotations

from .jets import InsufficientOrderError, UniSeries
from .rationals import rat


def metric_profile(f: UniSeries) -> UniSeries:
    """g(t) = f'(t) + t f''(t) for the potential f(|z|^2)."""
    f1 = f.diff()
    return f1 + f1.diff().times_t()


def inverse_profile(f: UniSeries) -> UniSeries:
    g = metric_profile(f)
    if g.coefficient(0) == 0:
        raise InsufficientOrderError("radial profile has degenerate metric at 0")
    return g.inv1()


def radial_laplacian(ginv: UniSeries, psi: UniSeries) -> UniSeries:
    """One application of the metric Laplacian to psi(|z|^2)."""
    p1 = psi.diff()
    return ginv * (p1 + p1.diff().times_t())


def power_at_origin(f: UniSeries, m: int, k: int):
    """Lap^k (t^m)(0) for the one-variable radial metric with profile f."""
    order = f.order
    psi = UniSeries(order, {m: rat(1)})
    ginv = inverse_profile(f)
    for _ in range(k):
        psi = radial_laplacian(ginv, psi)
    return psi.eval0()


def hyperbolic_profile(order: int) -> UniSeries:
    """f(t) = sum t^m / m, the truncation of -log(1-t)."""
    return UniSeries(
        order, {m: rat(1, m) for m in range(1, order + 1)}, exact=False
    )


def fubini_study_profile(order: int) -> UniSeries:
    """f(t) = sum (-1)^(m+1) t^m / m, the truncation of log(1+t)."""
    return UniSeries(
        order,
        {m: rat((-1) ** (m + 1), m) for m in range(1, order + 1)},
        exact=False,
    )


def flat_profile(order: int) -> UniSeries:
    """f(t) = t."""
    return UniSeries(order, {1: rat(1)})
