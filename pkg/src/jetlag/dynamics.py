"""Trajectory dynamics on the jet space: geodesics, the instanton energy
condition, the renormalized-Hamiltonian split, resonant zero-Yang-Mills
trajectories and the Jacobi-type deviation equations along them.

The geodesic system is dy/dt + 2G(t, x, y) = 0, dx/dt = y, integrated with
an adaptive embedded Runge-Kutta pair (4/5) with terminal events at the
singular loci (g11 -> 0, rdot -> 0, r -> 0).  An independent Euler-Lagrange
residual (all Lagrangian partials by finite differences, state derivative
from the dense output) is recorded along every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import DomainError
from .expint import exp_integral_f
from .models import LagrangianModel
from .monolayer import (
    MonolayerParams,
    _denominator,
    em_component_f21,
    lagrangian_value,
    potential_U,
    potential_U_drr,
    potential_U_dtt,
    zero_energy_bracket,
)
from .points import JetPoint, jet_point

_Y_AXES = ("y1", "y2")
_X_AXES = ("x1", "x2")


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    r: float
    phi: float
    rdot: float
    phidot: float

    def point(self) -> JetPoint:
        return jet_point(self.t, self.r, self.phi, self.rdot, self.phidot)


@dataclass(frozen=True)
class DeviationState:
    """Deviation components; on resonance delta_phi(t) = C1 + C2 t with
    C1 = delta_phi(t0) and C2 = delta_phidot(t0)."""

    delta_r: float = 0.0
    delta_rdot: float = 0.0
    delta_phi: float = 0.0
    delta_phidot: float = 0.0

    @property
    def c1(self) -> float:
        return self.delta_phi

    @property
    def c2(self) -> float:
        return self.delta_phidot


@dataclass(frozen=True)
class SingularEvent:
    kind: str  # metric_singular | rdot_zero | r_collapse | einst_zero_crossing
    t_lo: float
    t_hi: float
    t_event: float


@dataclass
class SimConfig:
    params: MonolayerParams
    state0: TrajectoryState
    t_end: float
    rtol: float = 1e-9
    atol: float = 1e-9
    max_step: float = math.inf
    epsilon_phidot: float = 0.0
    r_min: float = 1e-6
    compute_el_residual: bool = True
    el_max_points: int = 400

    def __post_init__(self):
        if self.t_end <= self.state0.t:
            raise ValueError("t_end must exceed the initial time")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("integrator tolerances must be positive")


@dataclass
class TrajectorySeries:
    """Sampled trajectory plus per-sample diagnostics; t strictly increasing."""

    params: MonolayerParams
    model_name: str
    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    rdot: np.ndarray
    phidot: np.ndarray
    e_inst: np.ndarray
    H: np.ndarray
    H_ym: np.ndarray
    eym: np.ndarray
    g11: np.ndarray
    el_residual: np.ndarray | None = None
    events: list[SingularEvent] = field(default_factory=list)
    status: str = "completed"

    def __len__(self):
        return len(self.t)


@dataclass
class DeviationSeries:
    t: np.ndarray
    delta_r: np.ndarray
    delta_rdot: np.ndarray
    delta_phi: np.ndarray
    delta_phidot: np.ndarray
    c1: float
    c2: float


@dataclass
class ResonantTrajectory:
    """Samples of the resonant radius r0 (rdot0 < 0 throughout).

    These samples already carry the time-reversal convention of the source
    material (they satisfy the post-reversal resonance equation), so they
    play the role of r0(-t) in the perturbed decomposition directly.
    """

    t: np.ndarray
    r0: np.ndarray
    r0dot: np.ndarray
    params: MonolayerParams
    R0: float
    source: str
    flags: list[str] = field(default_factory=list)

    def spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.t, self.r0, self.r0dot)

    def rdot_spline(self) -> CubicSpline:
        return CubicSpline(self.t, self.r0dot)

    def residual_eq21(self) -> np.ndarray:
        """Relative residual of the r0-exponent resonance condition."""
        p = self.params
        drive = 6.0 * p.p * p.V_abs * self.r0**5 * np.exp(2.0 * p.V_abs * self.t / self.r0)
        res = p.m * self.r0dot**3 + drive
        return np.abs(res) / np.maximum(np.abs(p.m * self.r0dot**3), drive)

    def residual_eq22(self) -> np.ndarray:
        """Relative residual of the large-time resonance condition."""
        p = self.params
        drive = 6.0 * p.p * p.V_abs * self.r0**5 * np.exp(
            2.0 * p.V_abs * self.t / (self.R0 - p.V_abs * self.t)
        )
        res = p.m * self.r0dot**3 + drive
        return np.abs(res) / np.maximum(np.abs(p.m * self.r0dot**3), drive)

    def ym_bracket_residual(self) -> np.ndarray:
        """Relative residual of the time-reversed zero-Yang-Mills bracket,
        3 m r0 / 2 + m^2 e^(-X) rdot0^3 / (4 p |V| r0^4) with the large-time
        exponent X; identically zero on resonance."""
        p = self.params
        X = 2.0 * p.V_abs * self.t / (self.R0 - p.V_abs * self.t)
        lead = 1.5 * p.m * self.r0
        bracket = lead + p.m**2 * np.exp(-X) * self.r0dot**3 / (4.0 * p.p * p.V_abs * self.r0**4)
        return np.abs(bracket) / lead


# -- pointwise diagnostics -----------------------------------------------------


def instanton_energy(state: TrajectoryState, params: MonolayerParams) -> float:
    """E_inst = (m/2) rdot^2 + (m r^2/2) phidot^2 + p r^5 |V| e^E / rdot - U."""
    if params.p != 0.0 and state.rdot == 0.0:
        raise DomainError("instanton energy contains rdot^-1; rdot = 0 is singular")
    out = 0.5 * params.m * (state.rdot**2 + state.r**2 * state.phidot**2)
    out -= potential_U(state.t, state.r, params)
    if params.p != 0.0:
        E = 2.0 * params.V_abs * state.t / state.r
        out += params.p * state.r**5 * params.V_abs * math.exp(E) / state.rdot
    return out


def hamiltonian_split(state: TrajectoryState, params: MonolayerParams):
    """(H, H_YM, delta_L, L0) of the renormalized-Hamiltonian decomposition.

    H = g11 rdot^2 + g22 phidot^2 - L (algebraically equal to -U); H_YM is
    the printed Yang-Mills energy; delta_L and L0 are evaluated from their
    explicit displays, so the identities delta_L = -(H - H_YM) and
    L0 = g22 phidot^2 + g11 rdot^2 - H_YM are genuine cross-checks.
    At p = 0 all potential pieces vanish and H = H_YM = delta_L = 0.
    """
    t, r, rdot, phidot = state.t, state.r, state.rdot, state.phidot
    if params.p != 0.0 and rdot == 0.0:
        raise DomainError("hamiltonian split requires rdot != 0")
    m, p, V = params.m, params.p, params.V_abs
    g11 = 0.5 * _denominator(t, r, rdot, params)
    g22 = 0.5 * m * r**2
    L = lagrangian_value(state.point(), params)
    H = g11 * rdot**2 + g22 * phidot**2 - L

    if p == 0.0:
        return H, 0.0, 0.0, g22 * phidot**2 + g11 * rdot**2

    E = 2.0 * V * t / r
    H_ym = phidot**2 * zero_energy_bracket(t, r, rdot, params) ** 2 / (4.0 * m)
    # e^(-2E) (m rdot^3 + 6 p |V| r^5 e^E)^2 grouped as (m rdot^3 e^-E + ...)^2
    # so the huge exponentials cancel before they can overflow/underflow
    stable = (m * rdot**3 * math.exp(-E) + 6.0 * p * V * r**5) ** 2
    delta_L = potential_U(t, r, params) + m * phidot**2 * stable / (64.0 * p**2 * V**2 * r**8)
    L0 = (
        -phidot**2 * zero_energy_bracket(t, r, rdot, params) ** 2 / (4.0 * m)
        + 0.5 * m * r**2 * phidot**2
        + 0.5 * rdot**2 * (m - 2.0 * p * V * r**5 * math.exp(E) / rdot**3)
    )
    return H, H_ym, delta_L, L0


def _diagnostics(params: MonolayerParams, t, r, phi, rdot, phidot):
    n = len(t)
    e_inst = np.empty(n)
    H = np.empty(n)
    H_ym = np.empty(n)
    eym = np.empty(n)
    g11 = np.empty(n)
    for i in range(n):
        st = TrajectoryState(t[i], r[i], phi[i], rdot[i], phidot[i])
        e_inst[i] = instanton_energy(st, params)
        H[i], H_ym[i], _, _ = hamiltonian_split(st, params)
        g11[i] = 0.5 * _denominator(t[i], r[i], rdot[i], params)
        if params.p == 0.0:
            eym[i] = 0.0
        else:
            f21 = em_component_f21(st.point(), params, form="exact")
            eym[i] = f21**2 / params.m
    return e_inst, H, H_ym, eym, g11


# -- geodesic integration ------------------------------------------------------


def _spray_of(model: LagrangianModel):
    def spray(t, r, phi, rdot, phidot):
        pt = jet_point(t, r, phi, rdot, phidot)
        closed = model.spray(pt)
        if closed is not None:
            return closed
        from .geometry import GeometryEvaluator

        G = GeometryEvaluator(model, pt).semispray().G
        return float(G[0]), float(G[1])

    return spray


def _safe_state(u, r_floor, needs_rdot):
    """Clamp trial-stage states so the RHS stays finite past the event loci."""
    r, phi, rdot, phidot = u
    if r < r_floor:
        r = r_floor
    if needs_rdot and abs(rdot) < 1e-12:
        rdot = math.copysign(1e-12, rdot if rdot != 0.0 else -1.0)
    return r, phi, rdot, phidot


def _el_residual_at(model, pt: JetPoint, ydot_est) -> float:
    """Normalized Euler-Lagrange residual

        d/dt(dL/dy^s) - dL/dx^s
          = d2L/dt dy^s + d2L/dx^q dy^s y^q + d2L/dy^q dy^s ydot^q - dL/dx^s

    with every partial from finite differences and ydot estimated from the
    integrated solution, so the check is independent of the closed-form
    spray that drove the integration."""
    from .geometry import GeometryEvaluator

    ev = GeometryEvaluator(model, pt)
    y = np.array(pt.y)
    worst = 0.0
    for s in range(2):
        terms = [ev.partial("t", _Y_AXES[s]), -ev.partial(_X_AXES[s])]
        terms += [ev.partial(_X_AXES[q], _Y_AXES[s]) * y[q] for q in range(2)]
        terms += [
            ev.partial(_Y_AXES[q], _Y_AXES[s]) * ydot_est[q] for q in range(2)
        ]
        scale = max(abs(v) for v in terms)
        if scale > 0.0:
            worst = max(worst, abs(sum(terms)) / scale)
    return worst


def integrate_geodesic(config: SimConfig, model: LagrangianModel) -> TrajectorySeries:
    """Integrate dy/dt = -2G, dx/dt = y adaptively until t_end or a
    singularity event; diagnostics and the EL residual come along."""
    pt0 = config.state0.point()
    violation = model.domain_violation(pt0)
    if violation is not None:
        raise DomainError(f"initial state invalid: {violation}")

    spray = _spray_of(model)
    needs_rdot = model.requires_nonzero_rdot
    r_floor = config.r_min / 10.0

    def rhs(t, u):
        r, phi, rdot, phidot = _safe_state(u, r_floor, needs_rdot)
        G1, G2 = spray(t, r, phi, rdot, phidot)
        return [rdot, phidot, -2.0 * G1, -2.0 * G2]

    events = []
    kinds = []

    def ev_r(t, u):
        return u[0] - config.r_min

    ev_r.terminal = True
    events.append(ev_r)
    kinds.append("r_collapse")

    if needs_rdot:

        def ev_rdot(t, u):
            return u[2]

        ev_rdot.terminal = True
        events.append(ev_rdot)
        kinds.append("rdot_zero")

    if model.metric_g11(pt0) is not None:

        def ev_g11(t, u):
            r, phi, rdot, phidot = _safe_state(u, r_floor, needs_rdot)
            return model.metric_g11(jet_point(t, r, phi, rdot, phidot))

        ev_g11.terminal = True
        events.append(ev_g11)
        kinds.append("metric_singular")

    u0 = [config.state0.r, config.state0.phi, config.state0.rdot, config.state0.phidot]
    sol = solve_ivp(
        rhs,
        (config.state0.t, config.t_end),
        u0,
        method="RK45",
        rtol=config.rtol,
        atol=config.atol,
        max_step=config.max_step,
        events=events,
        dense_output=True,
    )

    t = sol.t
    r, phi, rdot, phidot = sol.y

    recorded = []
    status = "completed"
    if sol.status == 1:  # a terminal event fired
        for kind, tev in zip(kinds, sol.t_events):
            if len(tev):
                below = t[t < tev[0]]
                t_lo = below[-1] if len(below) else t[0]
                recorded.append(SingularEvent(kind, float(t_lo), float(tev[0]), float(tev[0])))
                status = f"event:{kind}"
    elif sol.status < 0:
        status = f"failed:{sol.message}"

    e_inst, H, H_ym, eym, g11 = _diagnostics(config.params, t, r, phi, rdot, phidot)

    el = None
    if config.compute_el_residual and len(t) >= 3:
        stride = max(1, int(math.ceil(len(t) / config.el_max_points)))
        el = np.full(len(t), np.nan)
        span = t[-1] - t[0]
        dt = max(1e-6 * span, 1e-12)
        for i in range(0, len(t), stride):
            tc = min(max(t[i], t[0] + dt), t[-1] - dt)
            up = sol.sol(tc + dt)
            dn = sol.sol(tc - dt)
            ydot_est = ((up - dn) / (2.0 * dt))[2:]
            uc = sol.sol(tc)
            try:
                pt = jet_point(tc, uc[0], uc[1], uc[2], uc[3])
                el[i] = _el_residual_at(model, pt, ydot_est)
            except (ValueError, DomainError):
                el[i] = np.nan

    return TrajectorySeries(
        params=config.params,
        model_name=model.name,
        t=t,
        r=r,
        phi=phi,
        rdot=rdot,
        phidot=phidot,
        e_inst=e_inst,
        H=H,
        H_ym=H_ym,
        eym=eym,
        g11=g11,
        el_residual=el,
        events=recorded,
        status=status,
    )


# -- resonant trajectory -------------------------------------------------------


def resonant_rhs(t, r0, params: MonolayerParams, R0: float):
    """rdot0 = -(6 p |V| / m)^(1/3) r0^(5/3) e^(2|V|t / (3(R0 - |V|t)))."""
    c = (6.0 * params.p * params.V_abs / params.m) ** (1.0 / 3.0)
    return -c * np.asarray(r0) ** (5.0 / 3.0) * np.exp(
        2.0 * params.V_abs * t / (3.0 * (R0 - params.V_abs * t))
    )


def closed_form_r0(t, params: MonolayerParams, R0: float) -> np.ndarray:
    """The printed large-time solution, with the unhoused symbol v read as
    |V| (confirmed algebraically and by the ODE oracle)."""
    t = np.asarray(t, dtype=float)
    m, p, V = params.m, params.p, params.V_abs
    om = R0 - V * t
    if np.any(om <= 0.0):
        raise ValueError("t reaches R0/|V|: the large-time denominator blows up")
    alpha = 2.0 * R0 / (3.0 * om)
    cbrt6p = (6.0 * p) ** (1.0 / 3.0)
    B = (
        -4.0 * cbrt6p * R0 ** (5.0 / 3.0) * np.exp(-alpha)
        * (exp_integral_f(2.0 / 3.0) - exp_integral_f(alpha))
        + np.exp(-2.0 * V * t / (3.0 * om))
        * (9.0 * m ** (1.0 / 3.0) * V ** (2.0 / 3.0) + 6.0 * cbrt6p * R0 ** (5.0 / 3.0))
        - 6.0 * cbrt6p * R0 ** (2.0 / 3.0) * om
    )
    if np.any(B <= 0.0):
        raise ValueError("negative radicand in the closed-form resonant solution")
    return 27.0 * math.sqrt(m) * R0 * V * np.exp(t * V / (t * V - R0)) * B ** (-1.5)


def resonant_trajectory(
    params: MonolayerParams,
    t_span=None,
    source: str = "ode",
    n_samples: int = 400,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> ResonantTrajectory:
    """Resonant r0(t) over t_span (default [0, 0.8 R0/|V|]).

    source="ode" integrates the cube root of the large-time resonance
    condition, seeded with r0(t0) = R0 (1 - t0 |V| / R0); rdot0 samples are
    the RHS itself, so the large-time residual vanishes by construction.
    source="closed_form" evaluates the printed solution; its rdot0 comes
    from differentiating that closed form, so the residual is a genuine
    check of the printed expression.
    """
    if params.R0 is None:
        raise ValueError("resonant trajectory needs params.R0")
    if params.p == 0.0:
        raise ValueError("resonant trajectory needs p > 0")
    R0 = params.R0
    V = params.V_abs
    horizon = R0 / V
    if t_span is None:
        t_span = (0.0, 0.8 * horizon)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not 0.0 <= t0 < t1:
        raise ValueError("need 0 <= t_start < t_end")
    if t1 >= horizon:
        raise ValueError(
            f"t_end = {t1} reaches R0/|V| = {horizon}: the resonance exponent blows up"
        )

    grid = np.linspace(t0, t1, n_samples)
    flags: list[str] = []
    if source == "ode":
        seed = R0 * (1.0 - t0 * V / R0)
        sol = solve_ivp(
            lambda t, r: resonant_rhs(t, r, params, R0),
            (t0, t1),
            [seed],
            method="RK45",
            rtol=rtol,
            atol=atol,
            dense_output=True,
        )
        if sol.status != 0:
            raise RuntimeError(f"resonant integration failed: {sol.message}")
        # merge the solver's accepted steps into the grid: steep initial
        # decay (large R0) is then resolved well enough for the Hermite
        # interpolation the deviation equations ride on
        grid = np.union1d(grid, sol.t)
        r0 = sol.sol(grid)[0]
        r0dot = resonant_rhs(grid, r0, params, R0)
    elif source == "closed_form":
        r0 = closed_form_r0(grid, params, R0)
        h = 1e-8 * horizon
        r0dot = (closed_form_r0(grid + h, params, R0) - closed_form_r0(grid - h, params, R0)) / (
            2.0 * h
        )
    else:
        raise ValueError(f"unknown resonant source {source!r}")

    if np.any(r0 <= 0.0):
        flags.append("r0 reached zero inside the span")
    if np.any(r0dot >= 0.0):
        flags.append("rdot0 >= 0 somewhere: resonance sign analysis violated")
    return ResonantTrajectory(
        t=grid, r0=r0, r0dot=r0dot, params=params, R0=R0, source=source, flags=flags
    )


# -- deviation equations -------------------------------------------------------


def deviation_integrate(
    reference: ResonantTrajectory,
    init: DeviationState,
    params: MonolayerParams,
    t_eval=None,
    resonant_substitution: bool = True,
    u_second_derivative: str = "r",
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> DeviationSeries:
    """Integrate the explicit deviation ODEs along a resonant reference.

    delta_r obeys

        (2 p |V| r0^5 e^E0 - m rdot0^3) ddot(dr)
          + p |V| r0^3 e^E0 (2t|V| - 5 r0) rdot0 dot(dr)
          + rdot0^3 Udd(t, r0) dr = 0

    with Udd = d2U/dr2 (default) or d2U/dt2.  On resonant references the
    delta_phi friction coefficient is identically reduced to zero (the
    resonance-condition substitution), so delta_phi = C1 + C2 t; pass
    resonant_substitution=False to evaluate the printed coefficient
    literally instead.
    """
    if u_second_derivative not in ("r", "t"):
        raise ValueError("u_second_derivative must be 'r' or 't'")
    udd = potential_U_drr if u_second_derivative == "r" else potential_U_dtt

    spl = reference.spline()
    rdot_spl = reference.rdot_spline()
    # coarse-grid guard: the Hermite derivative must agree with the stored
    # velocities between the nodes
    mids = 0.5 * (reference.t[:-1] + reference.t[1:])
    d_spl = spl.derivative()(mids)
    d_dat = rdot_spl(mids)
    scale = np.max(np.abs(reference.r0dot))
    if np.max(np.abs(d_spl - d_dat)) > 1e-5 * scale:
        raise ValueError("reference grid too coarse for deviation interpolation")

    m, p, V = params.m, params.p, params.V_abs

    def coeffs(t):
        r0 = float(spl(t))
        rd0 = float(rdot_spl(t))
        E0 = 2.0 * V * t / r0
        expE0 = math.exp(E0)
        A = 2.0 * p * V * r0**5 * expE0 - m * rd0**3
        B = p * V * r0**3 * expE0 * (2.0 * t * V - 5.0 * r0) * rd0
        C = rd0**3 * udd(t, r0, params)
        return r0, rd0, A, B, C

    def phi_coeff(t, r0, rd0):
        # e^(-E0)-weighted grouping keeps the huge exponentials in check
        exp_mE0 = math.exp(-min(2.0 * V * t / r0, 700.0))
        f1 = m * rd0**3 * exp_mE0 + 6.0 * p * V * r0**5
        f2 = m * (t * V - 2.0 * r0) * rd0**3 * exp_mE0 + 3.0 * p * V * r0**6
        return rd0 * f1 * f2 / (8.0 * p**2 * V**2 * r0**12)

    # delta_r = delta_rdot = 0 is an exact solution of its (decoupled,
    # homogeneous) equation, so the radial block is skipped entirely then;
    # this also keeps collapsed references (r0 -> 0, exploding e^(2|V|t/r0)
    # coefficients) usable for the purely angular deviation scenario
    radial_active = init.delta_r != 0.0 or init.delta_rdot != 0.0

    def rhs(t, w):
        dr, drd, dphi, dphid = w
        if radial_active:
            r0, rd0, A, B, C = coeffs(t)
            ddr = -(B * drd + C * dr) / A
        else:
            r0, rd0 = float(spl(t)), float(rdot_spl(t))
            ddr = 0.0
        ddphi = 0.0 if resonant_substitution else -phi_coeff(t, r0, rd0) * dphid
        return [drd, ddr, dphid, ddphi]

    if t_eval is None:
        t_eval = reference.t
    t_eval = np.asarray(t_eval, dtype=float)
    w0 = [init.delta_r, init.delta_rdot, init.delta_phi, init.delta_phidot]
    sol = solve_ivp(
        rhs,
        (t_eval[0], t_eval[-1]),
        w0,
        method="RK45",
        rtol=rtol,
        atol=atol,
        t_eval=t_eval,
        dense_output=False,
    )
    if sol.status != 0:
        raise RuntimeError(f"deviation integration failed: {sol.message}")
    return DeviationSeries(
        t=sol.t,
        delta_r=sol.y[0],
        delta_rdot=sol.y[1],
        delta_phi=sol.y[2],
        delta_phidot=sol.y[3],
        c1=init.delta_phi,
        c2=init.delta_phidot,
    )


def compose_perturbed(
    reference: ResonantTrajectory, deviations: DeviationSeries
) -> TrajectorySeries:
    """r(t) = r0 + delta_r(t) on the reference's convention (the stored r0
    already carries the time reversal: it satisfies the post-reversal
    resonance equations with rdot0 < 0).  The unperturbed angle is constant
    (the fully separated phidot0 = 0 case), so phi(t) = delta_phi(t)."""
    if len(deviations.t) == len(reference.t) and np.allclose(
        deviations.t, reference.t, rtol=0.0, atol=1e-12 * max(1.0, reference.t[-1])
    ):
        t = reference.t
        r0 = reference.r0
        rd0 = reference.r0dot
        dev = deviations
    else:
        t = deviations.t
        if t[0] < reference.t[0] - 1e-12 or t[-1] > reference.t[-1] + 1e-12:
            raise ValueError("deviation grid extends beyond the reference span")
        r0 = reference.spline()(t)
        rd0 = reference.rdot_spline()(t)
        dev = deviations

    r = r0 + dev.delta_r
    rdot = rd0 + dev.delta_rdot
    phi = dev.delta_phi.copy()
    phidot = dev.delta_phidot.copy()
    e_inst, H, H_ym, eym, g11 = _diagnostics(reference.params, t, r, phi, rdot, phidot)
    return TrajectorySeries(
        params=reference.params,
        model_name="monolayer(composed)",
        t=np.asarray(t, dtype=float),
        r=r,
        phi=phi,
        rdot=rdot,
        phidot=phidot,
        e_inst=e_inst,
        H=H,
        H_ym=H_ym,
        eym=eym,
        g11=g11,
    )


def time_reverse(series: TrajectorySeries) -> TrajectorySeries:
    """Reverse a series in time on its own grid: sample order flips and
    velocities change sign (t -> -t, rdot -> -rdot).  Involutive exactly."""
    t = series.t
    r = series.r[::-1].copy()
    phi = series.phi[::-1].copy()
    rdot = -series.rdot[::-1]
    phidot = -series.phidot[::-1]
    e_inst, H, H_ym, eym, g11 = _diagnostics(series.params, t, r, phi, rdot, phidot)
    return TrajectorySeries(
        params=series.params,
        model_name=series.model_name,
        t=t.copy(),
        r=r,
        phi=phi,
        rdot=rdot,
        phidot=phidot,
        e_inst=e_inst,
        H=H,
        H_ym=H_ym,
        eym=eym,
        g11=g11,
        status=series.status,
    )


# -- post-hoc singularity scan ---------------------------------------------------


def _bisect(fn, t_lo, t_hi, iters: int = 80):
    f_lo = fn(t_lo)
    for _ in range(iters):
        mid = 0.5 * (t_lo + t_hi)
        f_mid = fn(mid)
        if f_lo * f_mid <= 0.0:
            t_hi = mid
        else:
            t_lo, f_lo = mid, f_mid
        if t_hi - t_lo < 1e-14 * max(1.0, abs(t_hi)):
            break
    return 0.5 * (t_lo + t_hi)


def singularity_scan(series: TrajectorySeries, r_threshold: float = 1e-6) -> list[SingularEvent]:
    """Locate sign changes of g11, rdot, r - threshold and E_inst between
    samples; each event is refined by bisection on Hermite interpolants."""
    events: list[SingularEvent] = []
    t = series.t
    if len(t) < 2:
        return events
    r_spl = CubicHermiteSpline(t, series.r, series.rdot)
    rd_spl = r_spl.derivative()
    pd_spl = CubicSpline(t, series.phidot)
    params = series.params

    def g11_of(tt):
        return 0.5 * _denominator(tt, float(r_spl(tt)), float(rd_spl(tt)), params)

    def einst_of(tt):
        st = TrajectoryState(
            tt, float(r_spl(tt)), 0.0, float(rd_spl(tt)), float(pd_spl(tt))
        )
        return instanton_energy(st, params)

    channels = [
        ("metric_singular", series.g11, g11_of),
        ("rdot_zero", series.rdot, lambda tt: float(rd_spl(tt))),
        ("r_collapse", series.r - r_threshold, lambda tt: float(r_spl(tt)) - r_threshold),
        ("einst_zero_crossing", series.e_inst, einst_of),
    ]
    for kind, samples, fn in channels:
        sign = np.sign(samples)
        for i in range(len(t) - 1):
            if sign[i] != 0 and sign[i + 1] != 0 and sign[i] != sign[i + 1]:
                try:
                    t_ev = _bisect(fn, t[i], t[i + 1])
                except (DomainError, ValueError):
                    t_ev = 0.5 * (t[i] + t[i + 1])
                events.append(SingularEvent(kind, float(t[i]), float(t[i + 1]), float(t_ev)))
    events.sort(key=lambda e: e.t_event)
    return events


def plateau_interval(t, r, threshold: float | None = None):
    """Longest interval with |dr/dt| below threshold (isotherm-style plateau).

    The threshold is artifact-defined; default is 10% of the mean |dr/dt|.
    Returns (t_start, t_end, duration); duration 0 when no sample qualifies.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    drdt = np.gradient(r, t)
    if threshold is None:
        threshold = 0.1 * float(np.mean(np.abs(drdt)))
    ok = np.abs(drdt) < threshold
    best = (t[0], t[0], 0.0)
    i = 0
    n = len(t)
    while i < n:
        if ok[i]:
            j = i
            while j + 1 < n and ok[j + 1]:
                j += 1
            if t[j] - t[i] > best[2]:
                best = (float(t[i]), float(t[j]), float(t[j] - t[i]))
            i = j + 1
        else:
            i += 1
    return best
