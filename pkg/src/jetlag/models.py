"""Lagrangian models the generic geometry pipeline can differentiate.

A model supplies its scalar value, a domain predicate and, optionally,
per-axis finite-difference scale hints and fast closed-form shortcuts
(spray, g11) that the dynamics integrator uses when present.  The generic
geometry pipeline itself only ever consumes ``value``/``domain_ok``/
``fd_scales`` so closed forms can never leak into the oracle.
"""

from __future__ import annotations

import numpy as np

from .points import JetPoint


class LagrangianModel:
    """Base interface; subclasses implement ``value``."""

    name = "model"
    #: True when the Lagrangian contains rdot^-1 (domain excludes rdot = 0)
    requires_nonzero_rdot = False

    def value(self, pt: JetPoint) -> float:
        raise NotImplementedError

    def domain_ok(self, pt: JetPoint) -> bool:
        return self.domain_violation(pt) is None

    def domain_violation(self, pt: JetPoint) -> str | None:
        """None if valid, else a message naming the violated precondition."""
        if pt.r <= 0.0:
            return f"r = {pt.r} <= 0"
        return None

    def fd_scales(self, pt: JetPoint):
        """Optional per-axis step scales for numeric_partials (None = default)."""
        return None

    # optional closed-form fast paths -------------------------------------
    def spray(self, pt: JetPoint):
        """(G1, G2) closed form, or None when only the FD route exists."""
        return None

    def metric_g11(self, pt: JetPoint):
        """Closed-form g11, or None; used for cheap singularity events."""
        return None


class FreePolarModel(LagrangianModel):
    """Free particle in the polar plane: L = (m/2)(rdot^2 + r^2 phidot^2).

    The flat benchmark: geodesics are straight lines, r^2 phidot is
    conserved, all torsions and the electromagnetic form vanish.
    """

    name = "free_polar"

    def __init__(self, m: float = 1.0):
        if m <= 0:
            raise ValueError("mass must be positive")
        self.m = float(m)

    def value(self, pt: JetPoint) -> float:
        return 0.5 * self.m * (pt.rdot**2 + pt.r**2 * pt.phidot**2)

    def spray(self, pt: JetPoint):
        return (-0.5 * pt.r * pt.phidot**2, pt.rdot * pt.phidot / pt.r)

    def metric_g11(self, pt: JetPoint):
        return 0.5 * self.m


class PolynomialModel(LagrangianModel):
    """L given by a plain callable of (t, r, phi, rdot, phidot).

    Handy for unit tests of the differentiation engine (quadratic and
    bilinear fixtures from the operation contracts).
    """

    name = "polynomial"

    def __init__(self, fn, domain=None):
        self._fn = fn
        self._domain = domain

    def value(self, pt: JetPoint) -> float:
        return float(self._fn(pt.t, pt.r, pt.phi, pt.rdot, pt.phidot))

    def domain_violation(self, pt: JetPoint) -> str | None:
        base = super().domain_violation(pt)
        if base is not None:
            return base
        if self._domain is not None and not self._domain(pt):
            return "point outside user-supplied domain"
        return None


def build_fd_scales(pt: JetPoint, t=None, x1=None, x2=None, y1=None, y2=None):
    """Assemble a 5-vector of FD scales, falling back to max(|v|, 1)."""
    base = np.maximum(np.abs(pt.as_array()), 1.0)
    for i, override in enumerate((t, x1, x2, y1, y2)):
        if override is not None:
            base[i] = override
    return base
