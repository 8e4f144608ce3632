import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starlab.codes import (
    classify_eigenstates,
    codewords,
    kl_check,
    stray_states,
    zero_photon_block,
)
from starlab.qspace import DEFAULT_LAYOUT
from starlab.starmodel import SystemParams, build_rot_hamiltonian

TWO_PI = 2 * math.pi


def test_codeword_amplitudes_and_norms():
    cw = codewords()
    for state in (cw.L0, cw.L1, cw.Lx):
        assert np.linalg.norm(state.data) == pytest.approx(1.0, abs=1e-14)
    assert cw.L1.data.conj() @ cw.L0.data == 0
    i_gf = DEFAULT_LAYOUT.index((0, 2, 0, 0))
    i_fg = DEFAULT_LAYOUT.index((2, 0, 0, 0))
    assert cw.L0.data[i_gf] == pytest.approx(+1 / math.sqrt(2))
    assert cw.L0.data[i_fg] == pytest.approx(-1 / math.sqrt(2))
    assert np.allclose(cw.Lx.data, (cw.L0.data + cw.L1.data) / math.sqrt(2))


def test_kl_conditions_hold_to_tolerance():
    rep = kl_check(codewords())
    assert rep.passed
    assert abs(rep.overlap) <= 1e-12
    for v in rep.cross_number:
        assert abs(v) <= 1e-12
    for v in rep.cross_single.values():
        assert abs(v) <= 1e-12
    # photon loss does not distinguish the codewords: both see mean
    # excitation 1 on each qutrit
    assert rep.diag_number_L0 == pytest.approx((1.0, 1.0), abs=1e-14)
    assert rep.diag_number_L1 == pytest.approx((1.0, 1.0), abs=1e-14)


def test_kl_report_serializes():
    d = kl_check(codewords()).as_dict()
    assert d["passed"] is True
    assert set(d) >= {"overlap_L1_L0", "cross_number", "cross_single",
                      "diag_number_L0", "diag_number_L1"}


def test_stray_energies_match_diagonalization_oracle():
    W, nu = TWO_PI * 10.0, TWO_PI * 10.0 / math.sqrt(3)
    ss = stray_states(W, nu)
    gap = math.sqrt(W ** 2 + nu ** 2)
    assert ss.E_T == pytest.approx(0.0, abs=1e-9 * W)
    assert ss.E_S_minus == pytest.approx(-gap, rel=1e-12)
    assert ss.E_S_plus == pytest.approx(+gap, rel=1e-12)

    # brute-force oracle: eigendecompose the driven block directly
    p = SystemParams(W=W, nu0=nu, nu1=-nu, Omega1=0, Omega2=0)
    block = zero_photon_block(build_rot_hamiltonian(p))
    evals = np.linalg.eigvalsh(block)
    for e in (-gap, -nu, 0.0, nu, gap):
        assert np.abs(evals - e).min() < 1e-9 * W


def test_stray_set_orthogonality():
    W, nu = TWO_PI * 8.0, TWO_PI * 3.1
    ss = stray_states(W, nu)
    cw = codewords()
    vecs = [ss.T.data, ss.S_minus.data, ss.S_plus.data]
    for i, v in enumerate(vecs):
        for w in vecs[i + 1:]:
            assert abs(v.conj() @ w) < 1e-10
        assert abs(v.conj() @ cw.L0.data) < 1e-10
        assert abs(v.conj() @ cw.L1.data) < 1e-10


def test_k_s_at_zero_detuning_is_one_eighth():
    # hand normalization: (1, 1, 1, 1, -2)/sqrt(8) -> overlap^2 with |fg| = 1/8
    ss = stray_states(TWO_PI * 5.0, 0.0)
    assert ss.k_s == pytest.approx(1.0 / 8.0, rel=1e-12)


def test_k_s_monotone_in_detuning_ratio():
    # the lower stray vector tips toward the symmetric (gf+fg) combination
    # as the detuning grows, so its |fg| weight rises from 1/8 toward 1/2
    # (and falls below 1/8 for the opposite detuning sign)
    W = TWO_PI * 10.0
    ratios = np.linspace(0.0, 2.0, 21)
    ks = [stray_states(W, r * W).k_s for r in ratios]
    assert all(a < b for a, b in zip(ks, ks[1:]))
    assert all(1 / 8 - 1e-12 <= k < 0.5 for k in ks)
    ks_neg = [stray_states(W, -r * W).k_s for r in ratios]
    assert all(a > b for a, b in zip(ks_neg, ks_neg[1:]))
    assert all(0 < k <= 1 / 8 + 1e-12 for k in ks_neg)


def test_stray_states_require_positive_drive():
    with pytest.raises(ValueError):
        stray_states(0.0, 1.0)


def test_classification_groups_and_energies():
    W = TWO_PI * 10.0
    nu = W / math.sqrt(3)
    p = SystemParams(W=W, nu0=nu, nu1=-nu, Omega1=0, Omega2=0)
    h = build_rot_hamiltonian(p)
    classes = classify_eigenstates(h, W, nu)
    assert len(classes) == 9
    by_label = {c.label: c for c in classes}
    assert set(by_label) == {"L0", "L1", "T", "S-", "S+", "eg", "ge", "ef", "fe"}
    assert by_label["L0"].energy == pytest.approx(-nu, rel=1e-12)
    assert by_label["L1"].energy == pytest.approx(+nu, rel=1e-12)
    assert by_label["L0"].group == "logical"
    assert by_label["S-"].group == "stray"
    assert by_label["eg"].group == "error"
    # bare error-state energy read off the diagonal
    assert by_label["eg"].energy == pytest.approx(-p.alpha1 / 2 - nu, rel=1e-12)

    # five driven states evenly spaced by nu at this detuning
    driven = sorted(by_label[k].energy for k in ("S-", "L0", "T", "L1", "S+"))
    gaps = np.diff(driven)
    assert np.abs(gaps - nu).max() <= 1e-9 * W


def test_classification_flags_degenerate_regime():
    # equal detunings merge the codewords with a third dark state; the
    # overlap threshold must surface this instead of mislabeling
    W = TWO_PI * 5.0
    nu = TWO_PI * 2.0
    p = SystemParams(W=W, nu0=nu, nu1=nu, Omega1=0, Omega2=0)
    h = build_rot_hamiltonian(p)
    with pytest.raises(ValueError, match="overlap"):
        classify_eigenstates(h, W, nu)


def test_five_state_set_is_orthonormal_eigenbasis():
    W = TWO_PI * 10.0
    nu = W / math.sqrt(3)
    ss = stray_states(W, nu)
    cw = codewords()
    p = SystemParams(W=W, nu0=nu, nu1=-nu, Omega1=0, Omega2=0)
    block = zero_photon_block(build_rot_hamiltonian(p))

    idx = [DEFAULT_LAYOUT.index((a, b, 0, 0)) for a in range(3) for b in range(3)]
    basis = {"S-": ss.S_minus.data[idx], "L0": cw.L0.data[idx], "T": ss.T.data[idx],
             "L1": cw.L1.data[idx], "S+": ss.S_plus.data[idx]}
    energies = {"S-": ss.E_S_minus, "L0": -nu, "T": ss.E_T, "L1": nu, "S+": ss.E_S_plus}
    for name, v in basis.items():
        assert np.linalg.norm(block @ v - energies[name] * v) <= 1e-9 * W
    mat = np.array(list(basis.values()))
    gram = mat.conj() @ mat.T
    assert np.abs(gram - np.eye(5)).max() < 1e-10


@given(st.floats(min_value=0.5, max_value=30.0), st.floats(min_value=-2.0, max_value=2.0))
@settings(max_examples=20, deadline=None)
def test_stray_vectors_solve_eigenproblem_for_any_parameters(w_mhz, ratio):
    W = TWO_PI * w_mhz
    nu = ratio * W
    ss = stray_states(W, nu)  # internal residual check would raise on failure
    gap = math.sqrt(W ** 2 + nu ** 2)
    assert ss.E_S_plus == pytest.approx(gap, rel=1e-9)
    assert ss.E_S_minus == pytest.approx(-gap, rel=1e-9)
