"""Jones matrices of the optical elements and composite channel blocks.

Element conventions (pinned by unit tests):

    hwp(theta)   = [[cos t, sin t], [sin t, -cos t]]  at t = theta, so that
                   rotation(a) == hwp(2a) @ hwp(a) and hwp is an involution.
    rotation(a)  = [[cos a, -sin a], [sin a, cos a]] = exp(-i a sigma_y).
    qwp(theta)   = R(theta) diag(1, i) R(-theta); qwp(-45 deg)|V> is
                   right-circular up to a global phase.
    PBS          transmits |H> in-path, reflects |V> cross-path, phase +1.

The dephasing block routes the vertical component through a wave plate whose
normative arm action is |V> -> sin(2 theta_v)|H> + cos(2 theta_v)|V>
(realized as hwp(pi - 2 theta_v)), which shrinks polarization coherence by
kappa = cos(2 theta_v) while preserving populations.  The inverted block is
the mirror circuit undoing it.
"""

from dataclasses import dataclass, field

import numpy as np

from .qcore import ID2, TOL, KrausSet, QuantumValueError, tensor

__all__ = [
    "OpticalElement",
    "ChannelBlock",
    "hwp",
    "qwp",
    "rotation",
    "pbs",
    "pbs_matrix",
    "path_phase",
    "pd_block",
    "ipd_block",
    "expansion_unitary",
    "compression_unitary",
    "kappa_from_theta_deg",
]

_P0 = np.diag([1, 0]).astype(complex)
_P1 = np.diag([0, 1]).astype(complex)


@dataclass(frozen=True)
class OpticalElement:
    """A single unitary element: its kind, parameter and target space."""

    kind: str                 # HWP | QWP | PBS | PHASE | ROT
    angle_or_phase: float     # radians
    target: str               # "polarization" | "path" | "joint"
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        defect = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
        if defect > TOL["unitary"]:
            raise QuantumValueError(f"{self.kind} element not unitary: defect {defect:.3g}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def hwp(theta):
    """Half-wave plate with matrix entries evaluated directly at theta."""
    c, s = np.cos(theta), np.sin(theta)
    return OpticalElement("HWP", float(theta), "polarization",
                          np.array([[c, s], [s, -c]], dtype=complex))


def rotation(alpha):
    """Polarization rotation exp(-i alpha sigma_y), an SO(2) Jones matrix."""
    c, s = np.cos(alpha), np.sin(alpha)
    return OpticalElement("ROT", float(alpha), "polarization",
                          np.array([[c, -s], [s, c]], dtype=complex))


def qwp(theta):
    """Quarter-wave plate at axis angle theta."""
    r = rotation(theta).matrix
    m = r @ np.diag([1.0, 1.0j]) @ r.conj().T
    return OpticalElement("QWP", float(theta), "polarization", m)


def pbs_matrix():
    """Polarizing beam splitter on the joint space: |H> in-path, |V> cross-path."""
    return tensor(_P0, ID2) + np.kron(_P1, np.array([[0, 1], [1, 0]], dtype=complex))


def pbs():
    """The beam splitter as a joint-space element."""
    return OpticalElement("PBS", 0.0, "joint", pbs_matrix())


def phase_on_path1(phi):
    """Relative arm phase exp(i phi) applied on path k1 (PZT model)."""
    return np.kron(ID2, np.diag([1.0, np.exp(1j * phi)]))


def path_phase(phi):
    """The arm phase as a joint-space element."""
    return OpticalElement("PHASE", float(phi), "joint", phase_on_path1(phi))


def _on_paths(pol_on_0, pol_on_1):
    # polarization action conditioned on the path register, pol (x) path order
    return np.kron(pol_on_0, _P0) + np.kron(pol_on_1, _P1)


def _check_theta_v(theta_v):
    if not 0.0 <= theta_v <= np.pi / 4 + 1e-15:
        raise QuantumValueError(
            f"theta_v = {theta_v:.6g} rad outside [0, pi/4]"
        )


def _pd_unitary(theta_v, pzt_phase):
    # PBS1 -> arm plates (H arm fixed, V arm rotated) -> PZT -> PBS2 -> HWP5
    b = pbs_matrix()
    arm_h = hwp(0.0).matrix                     # leaves |H> unchanged
    arm_v = hwp(np.pi - 2.0 * theta_v).matrix   # |V> -> sin2t|H> + cos2t|V>
    stage_arms = _on_paths(arm_h, arm_v)
    stage_flip = _on_paths(ID2, hwp(np.pi / 2).matrix)  # HWP5: |H> -> |V> on k1
    return stage_flip @ b @ phase_on_path1(pzt_phase) @ stage_arms @ b


@dataclass(frozen=True)
class ChannelBlock:
    """A composite block in dilation (joint unitary) and/or Kraus form."""

    name: str
    unitary: np.ndarray | None = field(default=None, compare=False)
    kraus: KrausSet | None = None
    traces_path_after: bool = False

    def __post_init__(self):
        if self.unitary is not None:
            u = np.asarray(self.unitary, dtype=complex)
            defect = np.abs(u.conj().T @ u - np.eye(4)).max()
            if defect > TOL["unitary"]:
                raise QuantumValueError(f"{self.name} block not unitary: defect {defect:.3g}")
            u.flags.writeable = False
            object.__setattr__(self, "unitary", u)


def pd_block(theta_v, pzt_phase=0.0):
    """Phase-damping block at wave-plate angle theta_v (radians, 0..pi/4).

    Returns both realizations: the 4-dim dilation assembled from PBS1,
    the arm wave plates, the PZT phase, PBS2 and HWP5 (ancilla starts in
    k0 and is traced after), and the equivalent 2-dim Kraus pair
    diag(1, cos 2theta_v), diag(0, sin 2theta_v).
    """
    _check_theta_v(theta_v)
    c = np.cos(2.0 * theta_v)
    s = np.sin(2.0 * theta_v)
    kraus = KrausSet([np.diag([1.0, c]).astype(complex),
                      np.diag([0.0, s]).astype(complex)])
    return ChannelBlock("PD", unitary=_pd_unitary(theta_v, pzt_phase),
                        kraus=kraus, traces_path_after=True)


def ipd_block(theta_v, pzt_phase=None, pd_pzt_phase=0.0):
    """Inverted phase-damping block undoing ``pd_block(theta_v)``.

    The mirror circuit (HWP10 on k1, PBS, arm plates HWP11/HWP12, PZT2,
    PBS4) composes to the inverse of the dephasing unitary.  The restoring
    PZT2 phase is solved analytically as -pd_pzt_phase unless given
    explicitly; the joint composite then satisfies ipd . pd = identity.
    """
    _check_theta_v(theta_v)
    if pzt_phase is None:
        pzt_phase = -pd_pzt_phase
    b = pbs_matrix()
    arm_h = hwp(0.0).matrix
    arm_v = hwp(np.pi - 2.0 * theta_v).matrix
    stage_arms = _on_paths(arm_h, arm_v)
    stage_flip = _on_paths(ID2, hwp(np.pi / 2).matrix)
    u = b @ stage_arms @ phase_on_path1(pzt_phase) @ b @ stage_flip
    return ChannelBlock("IPD", unitary=u, kraus=None, traces_path_after=True)


def _jones_parameter(n, omega0_tau):
    if n <= 1.0:
        raise QuantumValueError(f"gap ratio n = {n:.6g} must exceed 1")
    if omega0_tau < 0.0:
        raise QuantumValueError(f"omega0*tau = {omega0_tau:.6g} must be nonnegative")
    return (n + 1.0) * omega0_tau / 2.0


def expansion_unitary(n, omega0_tau):
    """Gap-expansion rotation S(alpha) with alpha = (n+1) omega0 tau / 2.

    Compiled from two half-wave plates at relative angle alpha:
    S(alpha) = hwp(2 alpha) @ hwp(alpha).
    """
    return rotation(_jones_parameter(n, omega0_tau))


def compression_unitary(n, omega0_tau):
    """Gap-compression rotation; same Jones parameter as the expansion."""
    return rotation(_jones_parameter(n, omega0_tau))


def kappa_from_theta_deg(theta_deg):
    """Coherence multiplier cos(2 theta) from an angle in degrees.

    Exact at the sweep anchors: 0 deg -> 1.0 and 45 deg -> 0.0, so the
    endpoint temperature ratios are reported exactly.
    """
    two_theta = 2.0 * float(theta_deg)
    if two_theta == 0.0:
        return 1.0
    if two_theta == 90.0:
        return 0.0
    if two_theta == 180.0:
        return -1.0
    return float(np.cos(np.deg2rad(two_theta)))
