import math

import numpy as np
import pandas as pd
import streamlit as st

from gaa_lab.ansatz_assignment import assign_b, check_no_crossing, summarize_crossings
from gaa_lab.exact_oracle import build_hamiltonian, eigensystem, me_consistency
from gaa_lab.exceptions import GAAError
from gaa_lab.model_core import PotentialParams, mobility_edge_energy
from gaa_lab.sweep_engine import GridSpec, alpha_scan, energy_scan, pr_scan, site_energy_table

# Set page config first
st.set_page_config(layout="wide")

# Hide default Streamlit footer and pin our own
st.markdown(
    """
    <style>
    footer {visibility: hidden;}
    .custom-footer {
        position: fixed;
        bottom: 0;
        left: 0;
        right: 0;
        background-color: white;
        padding: 10px 20px;
        border-top: 1px solid #ddd;
        z-index: 999;
    }
    [data-testid="stAppViewBlockContainer"] {
        padding-bottom: 60px;
    }
    [data-testid="stSidebar"] {
        min-width: 320px !important;
        max-width: 320px !important;
    }
    </style>
    """,
    unsafe_allow_html=True
)

st.title("Generalized Aubry-André Explorer")

# Presets match the two figure sets reproduced by the command-line tool
PRESETS = {
    "alpha = -0.5, phi = pi, N = 201": {"alpha": -0.5, "phi": math.pi, "n_sites": 201},
    "alpha = 0, phi = 0, N = 51": {"alpha": 0.0, "phi": 0.0, "n_sites": 51},
}

if "preset" not in st.session_state:
    st.session_state.preset = list(PRESETS)[0]

# --- 1. sidebar inputs ---
st.sidebar.subheader("Potential")
preset_name = st.sidebar.selectbox("Preset", options=list(PRESETS), key="preset")
preset = PRESETS[preset_name]

alpha = st.sidebar.slider("alpha", min_value=-0.95, max_value=0.95, value=float(preset["alpha"]), step=0.05)
phi_over_pi = st.sidebar.number_input("phi / pi", value=preset["phi"] / math.pi, step=0.25)
n_sites = st.sidebar.number_input("N", min_value=1, max_value=601, value=preset["n_sites"], step=1)
delta_over_j = st.sidebar.number_input("Delta / J", min_value=0.0, value=1.0, step=0.1)

st.sidebar.subheader("Ansatz")
m_sites = st.sidebar.number_input("First m sites", min_value=1, max_value=int(n_sites), value=min(15, int(n_sites)))
b_min, b_max = st.sidebar.slider("B range", min_value=-4.0, max_value=4.0, value=(-2.0, 2.0), step=0.5)
mu = st.sidebar.number_input("mu for PR/N", min_value=1, max_value=int(n_sites), value=min(100, int(n_sites)))

try:
    pot = PotentialParams(delta_over_j=delta_over_j, phi=phi_over_pi * math.pi, alpha=alpha, n_sites=int(n_sites))
    assignment = assign_b(pot, int(m_sites), (b_min, b_max))
except GAAError as e:
    st.error(str(e))
    st.stop()

tab_sites, tab_energy, tab_alpha, tab_pr, tab_oracle = st.tabs(
    ["Site energies", "E/J vs Delta/J", "E/J vs alpha", "PR/N", "Exact spectrum"]
)

# --- 2. site energies ---
with tab_sites:
    table = site_energy_table(pot, pot.n_sites)
    st.scatter_chart(table, x="mu", y="eps_over_delta")
    st.dataframe(site_energy_table(pot, int(m_sites)), hide_index=True)

# --- 3. energy curves against Delta/J ---
with tab_energy:
    curves = energy_scan(assignment, GridSpec("delta_over_j", 0.0, 5.0, 101))
    frame = curves.to_frame()
    wide = frame.pivot(index="delta_over_j", columns="mu", values="energy_over_j")
    wide.columns = [f"mu={c}" for c in wide.columns]
    if curves.me_line is not None:
        wide["ME"] = curves.me_line
    st.line_chart(wide)

    summary = summarize_crossings(check_no_crossing(assignment))
    st.write(f"**No-crossing check:** {summary['passed']} of {summary['pairs']} pairs keep their order for Delta/J > 0")
    st.dataframe(
        pd.DataFrame({"mu": assignment.mus, "B": assignment.b_values}),
        hide_index=True
    )

# --- 4. energy curves against alpha at the chosen Delta/J ---
with tab_alpha:
    curves = alpha_scan(pot, assignment, GridSpec("alpha", -0.95, 0.95, 191), delta_over_j)
    frame = curves.to_frame()
    wide = frame.pivot(index="alpha", columns="mu", values="energy_over_j")
    wide.columns = [f"mu={c}" for c in wide.columns]
    st.line_chart(wide)
    st.caption(f"Mobility edge: E/J = {2.0 - delta_over_j:.3g}/alpha")

# --- 5. participation ratio ---
with tab_pr:
    pr = pr_scan(int(mu), pot.n_sites, GridSpec("delta_over_j", 0.0, 10.0, 201))
    st.line_chart(pr, x="delta_over_j", y="pr_over_n")

# --- 6. exact diagonalization ---
with tab_oracle:
    spectrum = eigensystem(build_hamiltonian(pot))
    oracle = pd.DataFrame({
        "energy_over_j": spectrum.eigenvalues,
        "ipr": spectrum.iprs,
        "class": [c.value for c in spectrum.classes],
    })
    st.scatter_chart(oracle, x="energy_over_j", y="ipr", color="class")

    cols = st.columns(3)
    cols[0].metric("Mean IPR", f"{spectrum.mean_ipr:.4f}")
    cols[1].metric("Mean PR/N", f"{np.mean(spectrum.participation_ratios) / pot.n_sites:.4f}")
    if pot.alpha != 0:
        cols[2].metric("Mobility edge E/J", f"{mobility_edge_energy(pot.alpha, pot.delta_over_j):.4f}")
        with st.expander("Mobility-edge consistency"):
            st.json(me_consistency(spectrum, pot))

# --- 7. footer ---
st.markdown("<div class='custom-footer'>", unsafe_allow_html=True)
st.markdown(
    "Energies are in units of the hopping J. Ansatz curves use the Lorentzian population; "
    "the exact spectrum is an open chain diagonalized numerically."
)
st.markdown("</div>", unsafe_allow_html=True)
