"""Thermodynamics of the four-stroke cycle on a polarization qubit.

The working Hamiltonian is H = hbar omega sigma_y; its thermal state at
inverse temperature beta is (1/2)(1 - tanh(x) sigma_y) with the single
dimensionless knob x = hbar omega beta.  Energies are reported in units of
hbar omega0, temperatures as x values, entropies in nats.

Sign conventions: W > 0 means work performed on the qubit, Q > 0 means heat
flowing into it, so over a closed cycle W_AB + Q_BC + W_CD + Q_DA = 0 and
the hot stroke has Q_BC > 0 while the cold stroke has Q_DA < 0.  Heat is
computed as tr{H (rho_end - rho_start)} at constant H; work as the internal
energy change across a unitary stroke with the endpoint Hamiltonians.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import (
    ID2,
    SIGMA_Y,
    TOL,
    DensityOperator,
    QuantumValueError,
    relative_entropy,
    von_neumann_entropy,
)

__all__ = [
    "EngineParams",
    "ThermalState",
    "CycleLedger",
    "EntropyProduction",
    "hamiltonian",
    "thermal_state",
    "hot_x_from_kappa",
    "closed_form_energetics",
    "work_from_states",
    "heat_from_states",
    "entropy_production",
]


@dataclass(frozen=True)
class EngineParams:
    """Operating point: gap ratio n and cold-bath scale x_c = hbar omega0 beta_c."""

    omega0: float = 1.0
    n: float = 2.0
    x_c: float = 3.0

    def __post_init__(self):
        if self.n <= 1.0:
            raise QuantumValueError(f"gap ratio n = {self.n:.6g} must exceed 1")
        if self.x_c <= 0.0:
            raise QuantumValueError(f"x_c = {self.x_c:.6g} must be positive")


@dataclass(frozen=True)
class ThermalState:
    """Thermal state (1/2)(1 - tanh(x) sigma_y) together with its x."""

    rho: DensityOperator
    x: float


def hamiltonian(omega):
    """H = omega sigma_y in hbar omega0 units (pass omega as a ratio to omega0)."""
    return omega * SIGMA_Y


def thermal_state(x):
    """Thermal state of hbar omega sigma_y at dimensionless x = hbar omega beta."""
    if x < 0.0:
        raise QuantumValueError(f"x = {x:.6g} must be nonnegative")
    rho = DensityOperator(0.5 * (ID2 - math.tanh(x) * SIGMA_Y))
    return ThermalState(rho=rho, x=float(x))


class HotTemperature(NamedTuple):
    x_h: float
    r: float


def hot_x_from_kappa(kappa, params):
    """Map the dephasing multiplier kappa to the simulated hot-bath scale.

    x_h = arctanh(kappa * tanh(x_c)), the inverse-temperature setting for
    which the post-dephasing state is thermal at the expanded gap.  Also
    returns r = x_h / x_c, the (omega_fin beta_h)/(omega_ini beta_c) ratio.
    The endpoints kappa = 1 and kappa = 0 are returned exactly.
    """
    if not 0.0 <= kappa <= 1.0:
        raise QuantumValueError(f"kappa = {kappa:.6g} outside [0, 1]")
    if kappa == 1.0:
        x_h = params.x_c
    elif kappa == 0.0:
        x_h = 0.0
    else:
        x_h = math.atanh(kappa * math.tanh(params.x_c))
    return HotTemperature(x_h=x_h, r=x_h / params.x_c)


@dataclass(frozen=True)
class CycleLedger:
    """Per-cycle record of energetics and entropy production.

    theta_v is stored in radians; energies in hbar omega0 units; Sigma
    values in nats.  r is the ratio (omega_fin beta_h)/(omega_ini beta_c),
    which is what the cycle sweep is ordered by.
    """

    theta_v: float
    kappa: float
    r: float
    W_AB: float
    Q_BC: float
    W_CD: float
    Q_DA: float
    dU_cycle: float
    W_extracted: float
    Sigma_e: float
    Sigma_c: float
    Sigma_cycle: float


def _classical_kl(p, q):
    total = 0.0
    for pi, qi in zip(p, q):
        if pi > TOL["eig_clamp"]:
            total += pi * (math.log(pi) - math.log(qi))
    return total


def closed_form_energetics(kappa, params):
    """Closed-form ledger for a cycle at dephasing multiplier kappa.

    With t_c = tanh(x_c) and t_h = kappa t_c:

        W_AB = -(n - 1) t_c        Q_BC = n (t_c - t_h)
        W_CD =  (n - 1) t_h        Q_DA = -(t_c - t_h)

    The entropy productions are the aligned two-outcome divergences between
    the post-stroke states and their thermalization targets.
    """
    if not 0.0 <= kappa <= 1.0:
        raise QuantumValueError(f"kappa = {kappa:.6g} outside [0, 1]")
    n = params.n
    t_c = math.tanh(params.x_c)
    t_h = kappa * t_c
    w_ab = -(n - 1.0) * t_c
    q_bc = n * (t_c - t_h)
    w_cd = (n - 1.0) * t_h
    q_da = -(t_c - t_h)
    x_h, r = hot_x_from_kappa(kappa, params)

    p_cold = ((1.0 + t_c) / 2.0, (1.0 - t_c) / 2.0)
    p_hot = ((1.0 + t_h) / 2.0, (1.0 - t_h) / 2.0)
    sigma_e = _classical_kl(p_cold, p_hot)
    sigma_c = _classical_kl(p_hot, p_cold)
    return CycleLedger(
        theta_v=0.5 * math.acos(min(max(kappa, -1.0), 1.0)),
        kappa=kappa,
        r=r,
        W_AB=w_ab,
        Q_BC=q_bc,
        W_CD=w_cd,
        Q_DA=q_da,
        dU_cycle=w_ab + q_bc + w_cd + q_da,
        W_extracted=abs(q_bc) - abs(q_da),
        Sigma_e=sigma_e,
        Sigma_c=sigma_c,
        Sigma_cycle=sigma_e + sigma_c,
    )


def _expect(h, rho):
    return float(np.trace(h @ rho.matrix).real)


def work_from_states(rho_start, rho_end, h_start, h_end):
    """Work across a unitary stroke: tr{rho_end H_end} - tr{rho_start H_start}."""
    if rho_start.dim != h_start.shape[0] or rho_end.dim != h_end.shape[0]:
        raise QuantumValueError("work_from_states: state/Hamiltonian dimension mismatch")
    return _expect(h_end, rho_end) - _expect(h_start, rho_start)


def heat_from_states(rho_start, rho_end, h):
    """Heat across a constant-Hamiltonian stroke: tr{H (rho_end - rho_start)}.

    Positive when internal energy rises, so the hot thermalization yields
    Q > 0 and the cold one Q < 0.
    """
    if rho_start.dim != h.shape[0] or rho_end.dim != h.shape[0]:
        raise QuantumValueError("heat_from_states: state/Hamiltonian dimension mismatch")
    return _expect(h, rho_end) - _expect(h, rho_start)


class EntropyProduction(NamedTuple):
    """Both evaluations of the irreversible entropy of one thermalization."""

    from_balance: float      # Delta S - beta Q
    from_divergence: float   # D(rho_after_unitary || thermal target)


def entropy_production(rho_after_unitary, target, x, q):
    """Entropy produced relaxing rho_after_unitary to the thermal target.

    ``q`` must be the heat of the relaxation in units of hbar omega for the
    *same* omega that defines x, so beta Q reduces to x * q.  Returns both
    Delta S - beta Q and the relative entropy to the target; the two agree
    identically whenever q is the heat into the exact target state.
    """
    if not isinstance(rho_after_unitary, DensityOperator):
        rho_after_unitary = DensityOperator(rho_after_unitary)
    d_s = von_neumann_entropy(target.rho) - von_neumann_entropy(rho_after_unitary)
    balance = d_s - x * q
    divergence = relative_entropy(rho_after_unitary, target.rho)
    return EntropyProduction(from_balance=balance, from_divergence=divergence)
