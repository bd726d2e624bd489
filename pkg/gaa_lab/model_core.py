"""
Closed-form quantities of the parametrized generalized Aubry-Andre model.

All energies are ratios to the hopping amplitude J, which is fixed to 1.
Site indices run 1..N.
"""
import logging
import math
from enum import Enum

import numpy as np

from gaa_lab.exceptions import ParameterError

logger = logging.getLogger(__name__)

# Inverse golden ratio, the default incommensuration
GOLDEN_B = (math.sqrt(5.0) - 1.0) / 2.0

# Half-width of the band around the mobility edge reported as critical
DEFAULT_CLASSIFIER_TOL = 1e-9


class PotentialParams:
    """Knobs of the quasiperiodic potential: Delta/J, phi, alpha, b and N"""

    def __init__(self, delta_over_j=1.0, phi=0.0, alpha=0.0, b=GOLDEN_B, n_sites=201):
        """
        Args:
            delta_over_j: Quasiperiodicity amplitude in units of J (>= 0, may be inf)
            phi: Phase of the potential in radians
            alpha: Tuning parameter, strictly inside (-1, 1)
            b: Incommensuration, defaults to (sqrt(5) - 1)/2
            n_sites: Number of lattice sites N (>= 1)
        """
        delta_over_j = float(delta_over_j)
        alpha = float(alpha)
        if math.isnan(delta_over_j) or delta_over_j < 0:
            raise ParameterError("delta_over_j", f"must be >= 0, got {delta_over_j}")
        if not abs(alpha) < 1:
            raise ParameterError("alpha", f"must lie in (-1, 1), got {alpha}")
        if not math.isfinite(float(phi)):
            raise ParameterError("phi", f"must be finite, got {phi}")
        if not (math.isfinite(float(b)) and b > 0):
            raise ParameterError("b", f"must be a positive real, got {b}")
        if int(n_sites) != n_sites or n_sites < 1:
            raise ParameterError("n_sites", f"must be an integer >= 1, got {n_sites}")

        self.delta_over_j = delta_over_j
        self.phi = float(phi)
        self.alpha = alpha
        self.b = float(b)
        self.n_sites = int(n_sites)

    def replace(self, **changes):
        """Return a copy with some fields changed (validated again)"""
        fields = {
            "delta_over_j": self.delta_over_j,
            "phi": self.phi,
            "alpha": self.alpha,
            "b": self.b,
            "n_sites": self.n_sites,
        }
        fields.update(changes)
        return PotentialParams(**fields)

    def as_dict(self):
        return {
            "delta_over_j": self.delta_over_j,
            "phi": self.phi,
            "alpha": self.alpha,
            "b": self.b,
            "n_sites": self.n_sites,
        }

    def __eq__(self, other):
        if not isinstance(other, PotentialParams):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __repr__(self):
        return (
            f"PotentialParams(delta_over_j={self.delta_over_j!r}, phi={self.phi!r}, "
            f"alpha={self.alpha!r}, b={self.b!r}, n_sites={self.n_sites!r})"
        )


class AnsatzConstant:
    """The recurrence constant C and the diagonal constant B = 2C/(1 + C) it induces"""

    def __init__(self, c):
        self.c = float(c)
        self.b_value = b_from_c(self.c)

    @classmethod
    def from_c(cls, c):
        return cls(c)

    @classmethod
    def from_b(cls, b_value):
        return cls(c_from_b(b_value))

    def __repr__(self):
        return f"AnsatzConstant(c={self.c!r}, b_value={self.b_value!r})"


class StateClass(Enum):
    LOCALIZED = "localized"
    EXTENDED = "extended"
    CRITICAL = "critical"

    def __str__(self):
        return self.value


class Population:
    """
    Normalized site occupation P_n (n = 1..N) centred at site mu.

    width_mode is "finite", "uniform" (Delta/J = 0) or "delta" (Delta/J = inf).
    weights[n - 1] holds P_n.
    """

    FINITE = "finite"
    UNIFORM = "uniform"
    DELTA = "delta"

    def __init__(self, mu, n_sites, weights, width_mode, delta_over_j):
        self.mu = mu
        self.n_sites = n_sites
        self.weights = weights
        self.width_mode = width_mode
        self.delta_over_j = delta_over_j

    @property
    def width(self):
        """Lorentzian width J/Delta (inf in the uniform limit, 0 in the delta limit)"""
        if self.width_mode == Population.UNIFORM:
            return math.inf
        if self.width_mode == Population.DELTA:
            return 0.0
        return 1.0 / self.delta_over_j

    def __len__(self):
        return self.n_sites

    def __repr__(self):
        return (
            f"Population(mu={self.mu}, n_sites={self.n_sites}, "
            f"width_mode={self.width_mode!r}, delta_over_j={self.delta_over_j!r})"
        )


def _check_alpha(alpha):
    if not abs(alpha) < 1:
        raise ParameterError("alpha", f"must lie in (-1, 1), got {alpha}")


def site_energies(pot, sites=None):
    """
    Evaluate the quasiperiodic site energy eps_n/Delta for many sites at once.

    Args:
        pot: PotentialParams
        sites: Iterable of site indices (>= 1); defaults to 1..N

    Returns:
        numpy array of eps_n/Delta, one entry per requested site
    """
    _check_alpha(pot.alpha)
    if sites is None:
        n = np.arange(1, pot.n_sites + 1, dtype=float)
    else:
        n = np.asarray(sites, dtype=float)
        if n.size and n.min() < 1:
            raise ParameterError("n", f"site indices start at 1, got {int(n.min())}")
    phase = np.cos(2.0 * np.pi * n * pot.b + pot.phi)
    return phase / (1.0 - pot.alpha * phase)


def site_energy(n, pot):
    """
    Quasiperiodic site energy of a single site.

    Args:
        n: Site index (>= 1)
        pot: PotentialParams

    Returns:
        Tuple (eps_n/Delta, eps_n/J)
    """
    if int(n) != n or n < 1:
        raise ParameterError("n", f"site indices start at 1, got {n}")
    eps_over_delta = float(site_energies(pot, [n])[0])
    return eps_over_delta, _scale(pot.delta_over_j, eps_over_delta)


def _scale(delta_over_j, eps_over_delta):
    # inf * 0 is a vanishing numerator, not an undefined energy
    if eps_over_delta == 0.0:
        return 0.0
    return delta_over_j * eps_over_delta


def b_from_c(c):
    """B = 2C/(1 + C), the diagonal constant induced by the recurrence constant C"""
    c = float(c)
    if c == -1.0:
        raise ParameterError("c", "C = -1 is a pole of B = 2C/(1 + C)")
    return 2.0 * c / (1.0 + c)


def c_from_b(b_value):
    """Inverse of b_from_c: C = B/(2 - B)"""
    b_value = float(b_value)
    if b_value == 2.0:
        raise ParameterError("b_value", "B = 2 is only reached as C -> infinity")
    return b_value / (2.0 - b_value)


def lorentzian_population(mu, delta_over_j, n_sites):
    """
    Lorentzian atom population of width J/Delta centred at site mu.

    Delta/J = 0 gives the uniform limit 1/N and Delta/J = inf the Kronecker delta at mu.

    Args:
        mu: Localization site, 1 <= mu <= n_sites
        delta_over_j: Non-negative Delta/J, or math.inf
        n_sites: Number of sites N

    Returns:
        Population
    """
    if int(n_sites) != n_sites or n_sites < 1:
        raise ParameterError("n_sites", f"must be an integer >= 1, got {n_sites}")
    if int(mu) != mu or not 1 <= mu <= n_sites:
        raise ParameterError("mu", f"must lie in [1, {n_sites}], got {mu}")
    delta_over_j = float(delta_over_j)
    if math.isnan(delta_over_j) or delta_over_j < 0:
        raise ParameterError("delta_over_j", f"must be >= 0, got {delta_over_j}")
    mu = int(mu)
    n_sites = int(n_sites)

    if delta_over_j == 0.0:
        weights = np.full(n_sites, 1.0 / n_sites)
        mode = Population.UNIFORM
    elif math.isinf(delta_over_j):
        weights = np.zeros(n_sites)
        weights[mu - 1] = 1.0
        mode = Population.DELTA
    else:
        # width^2 / ((k - mu)^2 + width^2) with width = J/Delta
        k = np.arange(1, n_sites + 1, dtype=float)
        weights = 1.0 / (1.0 + ((k - mu) * delta_over_j) ** 2)
        weights = weights / weights.sum()
        mode = Population.FINITE

    return Population(mu, n_sites, weights, mode, delta_over_j)


def inverse_participation_ratio(p):
    """IPR = sum_n P_n^2"""
    return float(np.sum(p.weights ** 2))


def participation_ratio(p):
    """PR = 1/sum_n P_n^2, between 1 (point) and N (uniform)"""
    return 1.0 / inverse_participation_ratio(p)


def interaction_sum(p):
    """sum_n P_n (P_n - 1), bounded by -1 + 1/N (extended) and 0 (localized)"""
    w = p.weights
    return float(np.sum(w * (w - 1.0)))


def interaction_energy(p, u_over_j):
    """On-site interaction contribution U/J * sum_n P_n (P_n - 1)"""
    if u_over_j == 0:
        return 0.0
    return float(u_over_j) * interaction_sum(p)


def ansatz_energy(pot, mu, b_value, u_over_j=0.0):
    """
    Parametrized energy E/J of the state initially localized at site mu.

    E/J = sum_k [(Delta/J) eps_k/Delta - B] P_k(mu) + (U/J) sum_k P_k (P_k - 1)

    The sum of P_k is 1 by construction, so the B term is taken out of the
    sum; this keeps E/J = -B exact at Delta/J = 0.

    Args:
        pot: PotentialParams (delta_over_j may be inf)
        mu: Localization site
        b_value: The constant B(mu)
        u_over_j: Optional interaction ratio U/J (default 0)

    Returns:
        E/J as a float
    """
    population = lorentzian_population(mu, pot.delta_over_j, pot.n_sites)
    b_value = float(b_value)

    if population.width_mode == Population.UNIFORM:
        hopping_free = 0.0
    elif population.width_mode == Population.DELTA:
        eps_mu = float(site_energies(pot, [mu])[0])
        hopping_free = _scale(pot.delta_over_j, eps_mu)
    else:
        eps = site_energies(pot)
        hopping_free = pot.delta_over_j * float(np.dot(eps, population.weights))

    return hopping_free - b_value + interaction_energy(population, u_over_j)


def mobility_edge_energy(alpha, delta_over_j):
    """
    Energy of the exact mobility edge, alpha E = 2J - Delta.

    Args:
        alpha: Tuning parameter, must be non-zero
        delta_over_j: Delta/J

    Returns:
        E/J on the mobility edge
    """
    if alpha == 0:
        raise ParameterError(
            "alpha", "alpha = 0 has no energy-dependent mobility edge (the transition is Delta/J = 2)"
        )
    return (2.0 - float(delta_over_j)) / float(alpha)


def classify_state(e_over_j, alpha, delta_over_j, tol=DEFAULT_CLASSIFIER_TOL):
    """
    Place an energy on either side of the mobility edge.

    Localized iff alpha E/J > 2 - Delta/J (this reduces to Delta/J > 2 at alpha = 0),
    Extended iff alpha E/J < 2 - Delta/J, Critical within tol of the edge.

    Returns:
        StateClass
    """
    lhs = 0.0 if alpha == 0 else alpha * e_over_j
    threshold = 2.0 - delta_over_j
    if lhs > threshold + tol:
        return StateClass.LOCALIZED
    if lhs < threshold - tol:
        return StateClass.EXTENDED
    return StateClass.CRITICAL


def classify_energies(energies, alpha, delta_over_j, tol=DEFAULT_CLASSIFIER_TOL):
    """Vectorized classify_state; returns a list of StateClass"""
    energies = np.asarray(energies, dtype=float)
    if alpha == 0:
        lhs = np.zeros_like(energies)
    else:
        lhs = alpha * energies
    threshold = 2.0 - delta_over_j
    classes = []
    for value in lhs:
        if value > threshold + tol:
            classes.append(StateClass.LOCALIZED)
        elif value < threshold - tol:
            classes.append(StateClass.EXTENDED)
        else:
            classes.append(StateClass.CRITICAL)
    return classes
