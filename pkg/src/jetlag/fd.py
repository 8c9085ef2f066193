"""Central-difference engine for partial derivatives on the jet space.

Derivatives are requested as a tuple of axis names with repetition, e.g.
``("y1", "y1")`` for d2/drdot2 or ``("x1", "y2")`` for the mixed
d2/dr dphidot.  Total order <= 3.

Step policy (Ridders): the composite symmetric stencil is evaluated on a
geometric ladder of steps h0 / 2^i starting from h0 = 0.05 * scale per
axis, extrapolated in h^2 through a Neville tableau, and the entry with
the smallest error estimate wins.  This adapts automatically both to stiff
axes (exponential factors, where only the small steps converge) and to
axes whose contribution to L is tiny relative to |L| (where only the large
steps survive roundoff).  ``scale`` defaults to max(|coordinate|, 1)
(capped along r so probes respect r > 0); models may refine it via
``fd_scales`` -- the monolayer supplies 1/log-derivative scales for its
stiff axes.  Everything is deterministic for fixed inputs.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from .errors import StencilDomainError
from .points import AXES, JetPoint

_EPS = float(np.finfo(float).eps)

_H0_FACTOR = 0.05
_CON = 2.0
_CON2 = _CON * _CON
_NTAB = 8
_SAFE = 4.0

# symmetric central stencils per axis order: (offset, weight) pairs
_STENCILS = {
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}

MAX_ORDER = 3


def default_scales(pt: JetPoint) -> np.ndarray:
    """Per-axis base scale max(|v|, 1); r capped so probes keep r > 0."""
    scales = np.maximum(np.abs(pt.as_array()), 1.0)
    scales[1] = min(scales[1], 2.0 * pt.r)
    return scales


def _axis_orders(spec) -> tuple[int, ...]:
    counts = Counter(spec)
    unknown = set(counts) - set(AXES)
    if unknown:
        raise ValueError(f"unknown axes in derivative spec: {sorted(unknown)}")
    return tuple(counts.get(a, 0) for a in AXES)


def _composite_stencil(orders):
    """Tensor product of per-axis stencils: list of (offset_vector, weight)."""
    per_axis = []
    for order in orders:
        if order == 0:
            per_axis.append(((0, 1.0),))
        else:
            per_axis.append(_STENCILS[order])
    combined = []
    for combo in itertools.product(*per_axis):
        offsets = np.array([c[0] for c in combo], dtype=float)
        weight = math.prod(c[1] for c in combo)
        combined.append((offsets, weight))
    return combined


def numeric_partials(model, pt: JetPoint, spec, scales=None) -> float:
    """Finite-difference partial derivative of model.value at pt.

    spec is a tuple of axis names from ("t", "x1", "x2", "y1", "y2"), one
    entry per differentiation, total order <= 3.  Raises
    StencilDomainError when a probe point leaves the model's valid domain,
    naming the probe that failed.
    """
    spec = tuple(spec)
    total = len(spec)
    if not 1 <= total <= MAX_ORDER:
        raise ValueError(f"derivative order must be 1..{MAX_ORDER}, got {total}")
    orders = _axis_orders(spec)

    if scales is None:
        hinted = getattr(model, "fd_scales", None)
        if callable(hinted):
            try:
                scales = hinted(pt, spec)
            except TypeError:
                scales = hinted(pt)
        if scales is None:
            scales = default_scales(pt)
    scales = np.asarray(scales, dtype=float)

    h0 = scales * _H0_FACTOR
    stencil = _composite_stencil(orders)
    base = pt.as_array()
    denom_pow = np.array(orders, dtype=float)
    active = denom_pow > 0

    def apply(shrink: float) -> float:
        hs = h0 * shrink
        acc = 0.0
        for offsets, weight in stencil:
            q = base + offsets * hs
            try:
                probe = JetPoint.from_array(q)
            except ValueError as exc:
                raise StencilDomainError(
                    f"finite-difference probe left the coordinate domain at {q}: {exc}",
                    probe=q,
                ) from exc
            if not model.domain_ok(probe):
                raise StencilDomainError(
                    f"finite-difference probe {q} is outside the model's valid domain",
                    probe=q,
                )
            acc += weight * model.value(probe)
        return acc / float(np.prod(hs[active] ** denom_pow[active]))

    # Ridders: Neville tableau in h^2 over steps h0 / CON^i
    tableau = [[apply(1.0)]]
    best = tableau[0][0]
    err = math.inf
    for i in range(1, _NTAB):
        row = [apply(_CON**-i)]
        fac = _CON2
        for j in range(1, i + 1):
            prev = tableau[i - 1]
            row.append((row[j - 1] * fac - prev[j - 1]) / (fac - 1.0))
            fac *= _CON2
            errt = max(abs(row[j] - row[j - 1]), abs(row[j] - prev[j - 1]))
            if errt <= err:
                err, best = errt, row[j]
        tableau.append(row)
        if i >= 3 and abs(row[i] - tableau[i - 1][i - 1]) >= _SAFE * err:
            break
    return best


class _CallableField:
    """Adapter so scalar fields on jet space run through the same stencils."""

    def __init__(self, fn, domain_ok=None):
        self._fn = fn
        self._domain_ok = domain_ok

    def value(self, pt):
        return self._fn(pt)

    def domain_ok(self, pt):
        return True if self._domain_ok is None else self._domain_ok(pt)


def field_partial(fn, pt: JetPoint, spec, scales=None, domain_ok=None) -> float:
    """numeric_partials for a plain callable JetPoint -> float."""
    return numeric_partials(_CallableField(fn, domain_ok), pt, spec, scales=scales)


def noisy_field_partial(fn, pt: JetPoint, axis: str, scale: float, rel_step=2e-3):
    """First derivative of a field that is itself FD-computed (noisy).

    Plain central difference with a step sized for ~1e-9..1e-7 relative
    noise in fn; Richardson would only amplify the noise, so none is used.
    fn may return a float or an ndarray.
    """
    idx = AXES.index(axis)
    h = scale * rel_step
    base = pt.as_array()
    up, dn = base.copy(), base.copy()
    up[idx] += h
    dn[idx] -= h
    return (fn(JetPoint.from_array(up)) - fn(JetPoint.from_array(dn))) / (2.0 * h)
