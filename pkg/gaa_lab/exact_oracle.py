"""
Exact diagonalization of the generalized Aubry-Andre Hamiltonian.

The chain has open boundaries, hopping -J between neighbours and the
quasiperiodic site energies on the diagonal. It is the reference the
closed-form ansatz is checked against.
"""
import logging
import math

import numpy as np
from scipy.linalg import get_lapack_funcs

from gaa_lab.exceptions import OracleConvergenceError, ParameterError
from gaa_lab.model_core import StateClass, classify_energies, site_energies

logger = logging.getLogger(__name__)


class TridiagonalHamiltonian:
    """Symmetric tridiagonal matrix: diag holds eps_n/J, offdiag holds -1"""

    def __init__(self, diag, offdiag, pot):
        self.diag = diag
        self.offdiag = offdiag
        self.pot = pot

    @property
    def n_sites(self):
        return len(self.diag)

    def to_dense(self):
        """Full N x N matrix"""
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def apply(self, vectors):
        """
        Multiply H onto one vector or onto the columns of a matrix

        Args:
            vectors: Array of shape (N,) or (N, k)

        Returns:
            H @ vectors without forming the dense matrix
        """
        vectors = np.asarray(vectors, dtype=float)
        column = vectors.ndim == 1
        if column:
            vectors = vectors[:, None]
        out = self.diag[:, None] * vectors
        out[:-1] += self.offdiag[:, None] * vectors[1:]
        out[1:] += self.offdiag[:, None] * vectors[:-1]
        return out[:, 0] if column else out

    def spectral_bounds(self):
        """Gershgorin interval containing every eigenvalue"""
        radius = np.zeros(self.n_sites)
        radius[:-1] += np.abs(self.offdiag)
        radius[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))


class Spectrum:
    """Full eigensystem of a TridiagonalHamiltonian"""

    def __init__(self, eigenvalues, eigenvectors, iprs, classes):
        """
        Args:
            eigenvalues: Ascending E/J values
            eigenvectors: N x N array, column i belongs to eigenvalues[i]
            iprs: sum_n |psi_n|^4 per state
            classes: StateClass per state
        """
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.iprs = iprs
        self.classes = classes

    @property
    def participation_ratios(self):
        return 1.0 / self.iprs

    @property
    def mean_ipr(self):
        return float(np.mean(self.iprs))

    @property
    def trace(self):
        return float(np.sum(self.eigenvalues))

    def residuals(self, h):
        """||H psi - E psi|| for every state"""
        hv = h.apply(self.eigenvectors)
        return np.linalg.norm(hv - self.eigenvectors * self.eigenvalues[None, :], axis=0)

    def __len__(self):
        return len(self.eigenvalues)


def build_hamiltonian(pot):
    """
    Build the open-boundary GAA chain for a potential.

    Args:
        pot: PotentialParams with finite delta_over_j

    Returns:
        TridiagonalHamiltonian
    """
    if not math.isfinite(pot.delta_over_j):
        raise ParameterError("delta_over_j", "the exact Hamiltonian needs a finite Delta/J")
    eps = site_energies(pot)
    diag = pot.delta_over_j * eps
    offdiag = -np.ones(pot.n_sites - 1)
    return TridiagonalHamiltonian(diag, offdiag, pot)


def _fix_signs(vectors):
    # Largest-magnitude component of each eigenvector is made positive
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]


def eigensystem(h, tol=None):
    """
    Diagonalize a symmetric tridiagonal Hamiltonian with LAPACK's stev
    (implicit-shift QL/QR).

    Args:
        h: TridiagonalHamiltonian
        tol: Classifier tolerance forwarded to classify_energies (default 1e-9)

    Returns:
        Spectrum with eigenvalues ascending and unit-norm eigenvectors
    """
    n = h.n_sites
    diag = np.array(h.diag, dtype=np.float64)
    offdiag = np.array(h.offdiag, dtype=np.float64)

    if n == 1:
        eigenvalues = diag.copy()
        eigenvectors = np.ones((1, 1))
    else:
        stev, = get_lapack_funcs(("stev",), (diag, offdiag))
        eigenvalues, eigenvectors, info = stev(diag, offdiag, compute_v=1)
        if info < 0:
            raise ValueError(f"LAPACK stev rejected argument {-info}")
        if info > 0:
            raise OracleConvergenceError(info, n)
        order = np.argsort(eigenvalues, kind="stable")
        eigenvalues = eigenvalues[order]
        eigenvectors = _fix_signs(eigenvectors[:, order])

    iprs = np.sum(np.abs(eigenvectors) ** 4, axis=0)
    kwargs = {} if tol is None else {"tol": tol}
    classes = classify_energies(eigenvalues, h.pot.alpha, h.pot.delta_over_j, **kwargs)
    logger.debug("diagonalized N=%d chain at Delta/J=%g", n, h.pot.delta_over_j)
    return Spectrum(eigenvalues, eigenvectors, iprs, classes)


def me_consistency(s, pot):
    """
    Correlate each eigenstate's side of the mobility edge with its IPR.

    A Localized-side state agrees when its IPR is above the full-spectrum
    median; an Extended-side state agrees when it is below. Critical states
    never count as agreeing.

    Args:
        s: Spectrum of the Hamiltonian built from pot
        pot: PotentialParams with alpha != 0

    Returns:
        Dictionary with side counts, median IPRs and the agreement fraction
    """
    if pot.alpha == 0:
        raise ParameterError("alpha", "the mobility-edge comparison needs alpha != 0")

    classes = classify_energies(s.eigenvalues, pot.alpha, pot.delta_over_j)
    localized = np.array([c is StateClass.LOCALIZED for c in classes])
    extended = np.array([c is StateClass.EXTENDED for c in classes])
    median_ipr = float(np.median(s.iprs))

    agree = np.sum(localized & (s.iprs > median_ipr)) + np.sum(extended & (s.iprs < median_ipr))

    def _median(mask):
        return float(np.median(s.iprs[mask])) if mask.any() else math.nan

    return {
        "n_states": len(s),
        "n_localized": int(localized.sum()),
        "n_extended": int(extended.sum()),
        "n_critical": int(len(s) - localized.sum() - extended.sum()),
        "median_ipr": median_ipr,
        "median_ipr_localized": _median(localized),
        "median_ipr_extended": _median(extended),
        "agreement": float(agree) / len(s),
    }
