"""Charged-particle fixture Lagrangian for validating the EM pipeline.

L = m c phi_ij(x) y^i y^j + (2e/m) A_i(x) y^i + F_pot(t, x)  (usual time,
h11 = 1).  For this family the electromagnetic d-form collapses to the
classical field strength

    F_(i)j = -(e/2m) (dA_i/dx^j - dA_j/dx^i),

independent of phi_ij and F_pot, which is what makes it a good end-to-end
check of the generic pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import EMForm
from .models import LagrangianModel
from .points import JetPoint

Vec2Field = Callable[[np.ndarray], np.ndarray]


def _flat_phi(x: np.ndarray) -> np.ndarray:
    return np.eye(2)


def _zero_vec(x: np.ndarray) -> np.ndarray:
    return np.zeros(2)


def _zero_jac(x: np.ndarray) -> np.ndarray:
    return np.zeros((2, 2))


def _zero_pot(t: float, x: np.ndarray) -> float:
    return 0.0


@dataclass(frozen=True)
class ElectrodynamicsFixtureParams:
    """Fixture inputs: fields are callables of the base point x.

    A_jac must be the analytic Jacobian dA_i/dx^j of A; it feeds the
    closed-form F the generic pipeline is checked against.
    """

    m: float = 1.0
    c: float = 1.0
    e: float = 1.0
    phi: Callable[[np.ndarray], np.ndarray] = _flat_phi
    A: Vec2Field = _zero_vec
    A_jac: Callable[[np.ndarray], np.ndarray] = _zero_jac
    F_pot: Callable[[float, np.ndarray], float] = _zero_pot

    def __post_init__(self):
        if self.m == 0:
            raise ValueError("fixture needs m != 0")


class ElectrodynamicsModel(LagrangianModel):
    name = "electrodynamics_fixture"

    def __init__(self, params: ElectrodynamicsFixtureParams):
        self.params = params
        self.m = abs(params.m)

    def value(self, pt: JetPoint) -> float:
        x = np.array(pt.x)
        y = np.array(pt.y)
        par = self.params
        phi = np.asarray(par.phi(x), dtype=float)
        if abs(np.linalg.det(phi)) < 1e-14:
            raise ValueError("phi_ij is singular at this point")
        return float(
            par.m * par.c * y @ phi @ y
            + 2.0 * par.e / par.m * np.dot(par.A(x), y)
            + par.F_pot(pt.t, x)
        )


def electrodynamics_fixture(params: ElectrodynamicsFixtureParams) -> ElectrodynamicsModel:
    return ElectrodynamicsModel(params)


def closed_em_form(params: ElectrodynamicsFixtureParams, x) -> EMForm:
    """F_(i)j = -(e/2m)(dA_i/dx^j - dA_j/dx^i) from the analytic Jacobian."""
    jac = np.asarray(params.A_jac(np.asarray(x, dtype=float)), dtype=float)
    F = -params.e / (2.0 * params.m) * (jac - jac.T)
    return EMForm(F=F)
