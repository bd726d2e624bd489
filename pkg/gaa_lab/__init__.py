from gaa_lab.model_core import (
    GOLDEN_B,
    AnsatzConstant,
    Population,
    PotentialParams,
    StateClass,
    ansatz_energy,
    b_from_c,
    c_from_b,
    classify_energies,
    classify_state,
    interaction_energy,
    interaction_sum,
    inverse_participation_ratio,
    lorentzian_population,
    mobility_edge_energy,
    participation_ratio,
    site_energies,
    site_energy,
)
from gaa_lab.ansatz_assignment import (
    CrossingReport,
    SiteAssignment,
    assign_b,
    check_no_crossing,
    rank_sites_by_energy,
)
from gaa_lab.exact_oracle import Spectrum, TridiagonalHamiltonian, build_hamiltonian, eigensystem, me_consistency
from gaa_lab.sweep_engine import (
    EnergyCurveSet,
    GridSpec,
    alpha_scan,
    energy_scan,
    oracle_scan,
    pr_scan,
    read_config,
    read_dataset,
    site_energy_table,
    write_dataset,
)

__all__ = [
    'GOLDEN_B',
    'AnsatzConstant',
    'Population',
    'PotentialParams',
    'StateClass',
    'ansatz_energy',
    'b_from_c',
    'c_from_b',
    'classify_energies',
    'classify_state',
    'interaction_energy',
    'interaction_sum',
    'inverse_participation_ratio',
    'lorentzian_population',
    'mobility_edge_energy',
    'participation_ratio',
    'site_energies',
    'site_energy',
    'CrossingReport',
    'SiteAssignment',
    'assign_b',
    'check_no_crossing',
    'rank_sites_by_energy',
    'Spectrum',
    'TridiagonalHamiltonian',
    'build_hamiltonian',
    'eigensystem',
    'me_consistency',
    'EnergyCurveSet',
    'GridSpec',
    'alpha_scan',
    'energy_scan',
    'oracle_scan',
    'pr_scan',
    'read_config',
    'read_dataset',
    'site_energy_table',
    'write_dataset',
]
