import logging
from itertools import combinations

import numpy as np

from gaa_lab.exceptions import ParameterError
from gaa_lab.model_core import ansatz_energy, site_energies

logger = logging.getLogger(__name__)

# Default interval for B(mu)
DEFAULT_B_RANGE = (-2.0, 2.0)

# Energy gap below which two curves count as degenerate
DEGENERACY_GAP = 1e-12


def default_crossing_grid():
    """Delta/J = 0.05, 0.10, ..., 5.00"""
    return np.linspace(0.05, 5.0, 100)


class SiteAssignment:
    """Table of (mu, B) pairs for one potential, kept in ascending eps order"""

    def __init__(self, pot, b_range=DEFAULT_B_RANGE, sites=None):
        """
        Initialize an assignment

        Args:
            pot: PotentialParams the eps ordering is evaluated with
            b_range: Closed interval (b_min, b_max) every B must lie in
            sites: Optional iterable of (mu, b_value) pairs to add
        """
        b_min, b_max = float(b_range[0]), float(b_range[1])
        if not b_min < b_max:
            raise ParameterError("b_range", f"needs b_min < b_max, got [{b_min}, {b_max}]")
        self.pot = pot
        self.b_range = (b_min, b_max)
        self.sites = []
        self._eps = {}
        for mu, b_value in sites or []:
            self.add_site(mu, b_value)

    def add_site(self, mu, b_value):
        """
        Add one (mu, B) entry, checking range, uniqueness and eps-monotonicity

        Returns:
            The stored (mu, b_value) tuple
        """
        if int(mu) != mu or not 1 <= mu <= self.pot.n_sites:
            raise ParameterError("mu", f"must lie in [1, {self.pot.n_sites}], got {mu}")
        mu = int(mu)
        b_value = float(b_value)
        if mu in self._eps:
            raise ParameterError("mu", f"site {mu} is already assigned")
        b_min, b_max = self.b_range
        if not b_min <= b_value <= b_max:
            raise ParameterError("b_value", f"{b_value} is outside [{b_min}, {b_max}]")

        eps = float(site_energies(self.pot, [mu])[0])
        for other_mu, other_b in self.sites:
            other_eps = self._eps[other_mu]
            # eps' > eps must imply B' > B
            if (eps > other_eps and not b_value > other_b) or (eps < other_eps and not b_value < other_b):
                raise ParameterError(
                    "b_value",
                    f"site {mu} (eps/Delta={eps:.6g}, B={b_value:.6g}) breaks the eps ordering "
                    f"against site {other_mu} (eps/Delta={other_eps:.6g}, B={other_b:.6g})",
                )

        self._eps[mu] = eps
        self.sites.append((mu, b_value))
        self.sites.sort(key=lambda entry: (self._eps[entry[0]], entry[0]))
        return (mu, b_value)

    @property
    def mus(self):
        return [mu for mu, _ in self.sites]

    @property
    def b_values(self):
        return [b_value for _, b_value in self.sites]

    def b_for(self, mu):
        for site_mu, b_value in self.sites:
            if site_mu == mu:
                return b_value
        raise KeyError(mu)

    def eps_for(self, mu):
        return self._eps[mu]

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __repr__(self):
        return f"SiteAssignment(n={len(self.sites)}, b_range={self.b_range}, pot={self.pot!r})"


class CrossingReport:
    """Outcome of the non-crossing check for one unordered pair of sites"""

    def __init__(self, pair, grid, min_gap, sign_consistent, sign_changes):
        self.pair = pair
        self.grid = grid
        self.min_gap = min_gap
        self.sign_consistent = sign_consistent
        self.sign_changes = sign_changes

    @property
    def passed(self):
        return self.sign_consistent

    def as_row(self):
        return {
            "mu": self.pair[0],
            "mu_prime": self.pair[1],
            "min_gap": self.min_gap,
            "sign_consistent": self.sign_consistent,
            "n_sign_changes": len(self.sign_changes),
        }

    def __repr__(self):
        return (
            f"CrossingReport(pair={self.pair}, min_gap={self.min_gap:.3g}, "
            f"sign_consistent={self.sign_consistent})"
        )


def rank_sites_by_energy(pot, m):
    """
    Order sites 1..m by ascending eps_mu/Delta, ties broken by ascending mu.

    Args:
        pot: PotentialParams
        m: Number of leading sites to rank (1 <= m <= N)

    Returns:
        List of site indices
    """
    if int(m) != m or not 1 <= m <= pot.n_sites:
        raise ParameterError("m_sites", f"must lie in [1, {pot.n_sites}], got {m}")
    mus = np.arange(1, int(m) + 1)
    eps = site_energies(pot, mus)
    # lexsort sorts by the last key first
    order = np.lexsort((mus, eps))
    return [int(mu) for mu in mus[order]]


def assign_b(pot, m, b_range=DEFAULT_B_RANGE):
    """
    Spread B values linearly over b_range in ascending eps order.

    Rank r of m gets b_min + r (b_max - b_min)/(m - 1); a single site gets the midpoint.

    Args:
        pot: PotentialParams
        m: Number of leading sites to assign
        b_range: (b_min, b_max)

    Returns:
        SiteAssignment
    """
    b_min, b_max = float(b_range[0]), float(b_range[1])
    if not b_min < b_max:
        raise ParameterError("b_range", f"needs b_min < b_max, got [{b_min}, {b_max}]")
    ranked = rank_sites_by_energy(pot, m)

    if len(ranked) == 1:
        values = [(b_min + b_max) / 2.0]
    else:
        values = np.linspace(b_min, b_max, len(ranked)).tolist()

    assignment = SiteAssignment(pot, (b_min, b_max))
    for mu, b_value in zip(ranked, values):
        assignment.add_site(mu, b_value)
    logger.debug("assigned B over [%g, %g] to %d sites", b_min, b_max, len(ranked))
    return assignment


def _validate_crossing_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("grid", "must be a non-empty 1-D sequence of Delta/J values")
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0):
        raise ParameterError("grid", "Delta/J values must be finite and strictly positive")
    if np.any(np.diff(grid) <= 0):
        raise ParameterError("grid", "Delta/J values must be strictly increasing")
    return grid


def energy_curves(assignment, grid, u_over_j=0.0):
    """
    Ansatz energies of every assigned site over a Delta/J grid.

    Returns:
        Dict mu -> numpy array of E/J, one entry per grid point
    """
    curves = {}
    for mu, b_value in assignment:
        values = np.empty(len(grid))
        for i, delta_over_j in enumerate(grid):
            pot = assignment.pot.replace(delta_over_j=delta_over_j)
            values[i] = ansatz_energy(pot, mu, b_value, u_over_j)
        curves[mu] = values
    return curves


def _pair_report(pair, first, second, grid):
    diff = first - second
    gaps = np.abs(diff)
    min_gap = float(gaps.min())
    signs = np.sign(diff)
    signs[gaps < DEGENERACY_GAP] = 0.0
    sign_consistent = bool(np.all(signs > 0) or np.all(signs < 0))
    flips = np.nonzero(signs[1:] != signs[:-1])[0] + 1
    sign_changes = [float(grid[i]) for i in flips]
    return CrossingReport(pair, grid, min_gap, sign_consistent, sign_changes)


def check_no_crossing(assignment, grid=None):
    """
    Sample every pair of assigned energy curves for a change of order.

    A pair passes when E_mu - E_mu' keeps one sign over all (positive) grid
    points; a gap below DEGENERACY_GAP at any point is a failure.

    Args:
        assignment: SiteAssignment
        grid: Strictly positive, strictly increasing Delta/J samples
              (defaults to 0.05..5 in steps of 0.05)

    Returns:
        List of CrossingReport, one per unordered pair, pairs as (smaller mu, larger mu)
    """
    grid = _validate_crossing_grid(default_crossing_grid() if grid is None else grid)
    curves = energy_curves(assignment, grid)

    reports = []
    for mu_a, mu_b in combinations(sorted(curves), 2):
        reports.append(_pair_report((mu_a, mu_b), curves[mu_a], curves[mu_b], grid))

    failing = sum(1 for report in reports if not report.sign_consistent)
    if failing:
        logger.info("%d of %d site pairs change order on the Delta/J grid", failing, len(reports))
    return reports


def crossing_report(assignment, mu, mu_prime, grid=None):
    """Report for a single pair; symmetric in (mu, mu_prime)"""
    grid = _validate_crossing_grid(default_crossing_grid() if grid is None else grid)
    pair = tuple(sorted((int(mu), int(mu_prime))))
    if pair[0] == pair[1]:
        raise ParameterError("mu", "a crossing check needs two distinct sites")
    subset = SiteAssignment(
        assignment.pot,
        assignment.b_range,
        [(site, assignment.b_for(site)) for site in pair],
    )
    curves = energy_curves(subset, grid)
    return _pair_report(pair, curves[pair[0]], curves[pair[1]], grid)


def summarize_crossings(reports):
    """Counts of passing and failing pairs"""
    passed = sum(1 for report in reports if report.sign_consistent)
    return {"pairs": len(reports), "passed": passed, "failed": len(reports) - passed}
