"""Dense complex linear algebra and density-operator primitives.

Everything in the simulator lives in a 2-dim polarization space, a 2-dim
path space, or their 4-dim product.  The fixed ordering convention is
polarization (x) path, with basis

    |H> = |0>_S,  |V> = |1>_S   (polarization / system)
    k0  = |0>_R,  k1  = |1>_R   (path / reservoir)

so joint basis index = 2*pol + path.  All entropies are in nats.

Matrices are plain complex ndarrays of shape (2, 2) or (4, 4); the only
wrapped types are :class:`DensityOperator` (validated, immutable) and
:class:`KrausSet` (completeness-checked).
"""

import numpy as np

__all__ = [
    "TOL",
    "ID2",
    "ID4",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULIS",
    "KET_H",
    "KET_V",
    "KET_PSI_RC",
    "QuantumValueError",
    "SupportError",
    "DensityOperator",
    "KrausSet",
    "tensor",
    "partial_trace_path",
    "apply_kraus",
    "eig_herm",
    "von_neumann_entropy",
    "relative_entropy",
    "fidelity",
]

# Single tuning point for every numerical tolerance used by the package
# and its acceptance tests.
TOL = {
    "herm": 1e-12,          # max-norm Hermiticity defect of a density operator
    "trace": 1e-12,         # |tr(rho) - 1|
    "psd": -1e-10,          # smallest admissible eigenvalue of a density operator
    "kraus": 1e-12,         # completeness defect of a Kraus set
    "unitary": 1e-12,       # unitarity defect of optical elements
    "eig_herm_input": 1e-10,    # Hermiticity required by eig_herm
    "eig_reconstruct": 1e-10,   # ||V diag(lam) V^dag - m||_max
    "eig_clamp": 1e-14,     # eigenvalues below this are treated as 0 in logs
    "support": 1e-12,       # sigma eigenvalues below this count as outside support
    "dilation_vs_kraus": 1e-12,  # agreement of the two PD realizations
    "energy": 1e-9,         # closed-form vs state-derived energetics, first law
    "entropy_identity": 1e-9,    # Delta S - beta Q vs relative entropy
    "cycle_closure": 1e-10,      # final vs initial polarization state
    "roundtrip": 1e-12,     # tomography measure -> stokes -> reconstruct
    "stokes_physical": 1e-9,     # admissible Bloch-vector norm excess
    "golden_fidelity": 0.98,     # simulator vs experimental matrices
}

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
# Right-circular polarization (|H> - i|V>)/sqrt(2); -1 eigenstate of sigma_y.
KET_PSI_RC = np.array([1, -1j], dtype=complex) / np.sqrt(2)

for _m in (ID2, ID4, SIGMA_X, SIGMA_Y, SIGMA_Z, KET_H, KET_V, KET_PSI_RC):
    _m.flags.writeable = False


class QuantumValueError(ValueError):
    """Raised when a matrix violates a structural invariant."""


class SupportError(QuantumValueError):
    """Raised when relative entropy diverges (support violation)."""


def _as_square(m, name="matrix"):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 4):
        raise QuantumValueError(f"{name} must be 2x2 or 4x4, got shape {a.shape}")
    return a


class DensityOperator:
    """Validated, immutable density operator on 1 or 2 qubits.

    Construction checks Hermiticity, unit trace and positivity against the
    central tolerance table and raises :class:`QuantumValueError` on any
    violation.  The underlying array is frozen; operations return new
    instances.
    """

    __slots__ = ("matrix", "label")

    def __init__(self, matrix, label=None):
        m = _as_square(matrix, "density operator").copy()
        herm = np.abs(m - m.conj().T).max()
        if herm > TOL["herm"]:
            raise QuantumValueError(f"not Hermitian: defect {herm:.3g}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TOL["trace"]:
            raise QuantumValueError(f"trace {tr:.15g} != 1")
        lam_min = np.linalg.eigvalsh(m).min()
        if lam_min < TOL["psd"]:
            raise QuantumValueError(f"not positive semidefinite: min eigenvalue {lam_min:.3g}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def relabel(self, label):
        out = object.__new__(DensityOperator)
        object.__setattr__(out, "matrix", self.matrix)
        object.__setattr__(out, "label", label)
        return out

    @classmethod
    def from_ket(cls, ket, label=None):
        v = np.asarray(ket, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), label=label)

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"DensityOperator(dim={self.dim}{tag})"


class KrausSet:
    """A completeness-checked set of Kraus operators of a common dimension."""

    __slots__ = ("operators",)

    def __init__(self, operators):
        ops = tuple(_as_square(k, "Kraus operator").copy() for k in operators)
        if not ops:
            raise QuantumValueError("Kraus set must not be empty")
        dim = ops[0].shape[0]
        if any(k.shape[0] != dim for k in ops):
            raise QuantumValueError("Kraus operators must share one dimension")
        total = sum(k.conj().T @ k for k in ops)
        defect = np.abs(total - np.eye(dim)).max()
        if defect > TOL["kraus"]:
            raise QuantumValueError(f"incomplete Kraus set: defect {defect:.3g}")
        for k in ops:
            k.flags.writeable = False
        object.__setattr__(self, "operators", ops)

    def __setattr__(self, name, value):
        raise AttributeError("KrausSet is immutable")

    @property
    def dim(self):
        return self.operators[0].shape[0]


def tensor(a, b):
    """Kronecker product of two 2x2 matrices, polarization (x) path order."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise QuantumValueError(f"tensor expects 2x2 factors, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def partial_trace_path(rho4):
    """Trace out the path (reservoir) factor of a two-qubit density operator."""
    if not isinstance(rho4, DensityOperator):
        rho4 = DensityOperator(rho4)
    if rho4.dim != 4:
        raise QuantumValueError("partial_trace_path expects a 4x4 density operator")
    red = rho4.matrix.reshape(2, 2, 2, 2)
    red = np.einsum("ikjk->ij", red)
    return DensityOperator(red)


def apply_kraus(rho, kraus):
    """Apply a channel rho -> sum_i K_i rho K_i^dag."""
    if not isinstance(kraus, KrausSet):
        kraus = KrausSet(kraus)
    r = rho.matrix if isinstance(rho, DensityOperator) else DensityOperator(rho).matrix
    if r.shape[0] != kraus.dim:
        raise QuantumValueError(f"dimension mismatch: state {r.shape[0]}, Kraus {kraus.dim}")
    out = sum(k @ r @ k.conj().T for k in kraus.operators)
    return DensityOperator(out)


def eig_herm(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending
    and eigenvector columns phase-fixed so the first component of magnitude
    above 1e-12 is real positive.
    """
    a = _as_square(m, "eig_herm input")
    defect = np.abs(a - a.conj().T).max()
    if defect > TOL["eig_herm_input"]:
        raise QuantumValueError(f"eig_herm needs a Hermitian matrix: defect {defect:.3g}")
    lam, vec = np.linalg.eigh(a)
    lam = lam[::-1].copy()
    vec = vec[:, ::-1].copy()
    for j in range(vec.shape[1]):
        col = vec[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            phase = col[nz[0]] / abs(col[nz[0]])
            vec[:, j] = col / phase
    return lam, vec


def _clamped_spectrum(rho):
    lam, vec = eig_herm(rho.matrix if isinstance(rho, DensityOperator) else rho)
    lam = np.where(lam < TOL["eig_clamp"], 0.0, lam)
    return lam, vec


def von_neumann_entropy(rho):
    """S = -sum lam ln lam in nats, with 0 ln 0 := 0."""
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    lam, _ = _clamped_spectrum(rho)
    nz = lam[lam > 0]
    return float(max(-np.sum(nz * np.log(nz)), 0.0))


def relative_entropy(rho, sigma):
    """Quantum relative entropy D(rho || sigma) = tr rho ln rho - tr rho ln sigma.

    Raises :class:`SupportError` when rho has weight outside the support of
    sigma (the divergence would be +inf).
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    if not isinstance(sigma, DensityOperator):
        sigma = DensityOperator(sigma)
    if rho.dim != sigma.dim:
        raise QuantumValueError("relative_entropy needs operators of equal dimension")
    lam_r, _ = _clamped_spectrum(rho)
    nz = lam_r[lam_r > 0]
    tr_rho_ln_rho = float(np.sum(nz * np.log(nz)))

    lam_s, vec_s = _clamped_spectrum(sigma)
    weights = np.real(np.einsum("ij,jk,ki->i", vec_s.conj().T, rho.matrix, vec_s))
    tr_rho_ln_sigma = 0.0
    for w, mu in zip(weights, lam_s):
        if mu < TOL["support"]:
            if w > TOL["support"]:
                raise SupportError(
                    f"support violation: weight {w:.3g} on eigenvalue {mu:.3g}"
                )
            continue
        tr_rho_ln_sigma += w * np.log(mu)
    return tr_rho_ln_rho - tr_rho_ln_sigma


def _psd_sqrt(m):
    lam, vec = np.linalg.eigh(m)
    return vec @ np.diag(np.sqrt(np.maximum(lam, 0.0))) @ vec.conj().T


def fidelity(rho, sigma):
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1].

    For a pure sigma this equals <psi|rho|psi>.  Qubit inputs use the exact
    closed form tr(rho sigma) + 2 sqrt(det rho det sigma), which avoids the
    precision loss of the matrix square roots near pure states.
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    if not isinstance(sigma, DensityOperator):
        sigma = DensityOperator(sigma)
    if rho.dim != sigma.dim:
        raise QuantumValueError("fidelity needs operators of equal dimension")
    if rho.dim == 2:
        overlap = float(np.trace(rho.matrix @ sigma.matrix).real)
        det_prod = float((np.linalg.det(rho.matrix) * np.linalg.det(sigma.matrix)).real)
        f = overlap + 2.0 * np.sqrt(max(det_prod, 0.0))
    else:
        sq = _psd_sqrt(rho.matrix)
        lam = np.linalg.eigvalsh(sq @ sigma.matrix @ sq)
        f = float(np.sum(np.sqrt(np.maximum(lam, 0.0))) ** 2)
    return min(max(f, 0.0), 1.0)
