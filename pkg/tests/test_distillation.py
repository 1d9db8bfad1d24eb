import numpy as np
import pytest

from nongauss import (ArgumentError, DensityMatrix, FockStateVector,
                      NumericalValidityError, delta_b)
from nongauss.channels import apply_beam_splitter_tensor, squeeze
from nongauss.distillation import (BranchEnsemble, b_protocol_run,
                                   b_protocol_step, browne_state, log_negativity,
                                   max_two_mode_ng, renormalized_ng,
                                   t_protocol_output)
from nongauss.states import PNESSpec, pnes, vacuum


def test_browne_states():
    rho = browne_state("a", 0.0)
    assert abs(np.real(rho.matrix[0, 0]) - 1.0) < 1e-12
    rho_b = browne_state("b", 1.0)
    eigs = np.linalg.eigvalsh(rho_b.matrix)
    assert np.sum(eigs > 1e-12) == 2 and eigs[0] > -1e-12
    with pytest.raises(ArgumentError):
        browne_state("c", 0.5)


def test_log_negativity():
    d = 8
    amps = np.zeros(d * d, dtype=complex)
    amps[0] = amps[1 + d] = 1 / np.sqrt(2)
    bell = FockStateVector(2, d, amps)
    assert abs(log_negativity(bell) - 1.0) < 1e-12
    assert abs(log_negativity(bell.density()) - 1.0) < 1e-12  # Schmidt vs dense
    prod = vacuum(4, modes=2)
    assert log_negativity(prod) < 1e-12
    for lam in (0.3, 0.7, 1.0):
        analytic = np.log2((1 + lam) ** 2 / (1 + lam ** 2))
        assert abs(log_negativity(browne_state("a", lam)) - analytic) < 1e-10


def test_log_negativity_local_unitary_invariance():
    rho = browne_state("a", 0.8, cutoff=12)
    base = log_negativity(rho)
    moved = squeeze(rho, 0.2, 0.5, mode=0)
    assert abs(log_negativity(moved) - base) < 1e-6
    moved = squeeze(rho, 0.15, 1.2, mode=1)
    assert abs(log_negativity(moved) - base) < 1e-6


def test_b_protocol_vacuum_fixed_point():
    out, prob = b_protocol_step(vacuum(8, modes=2))
    assert abs(prob - 1.0) < 1e-12
    assert delta_b(out.to_density()).value <= 1e-12


def test_b_protocol_gaussian_fixed_point():
    tb = pnes(PNESSpec("twin_beam", 0.25, 10))
    out, prob = b_protocol_step(tb)
    assert 0 < prob <= 1
    assert delta_b(out.to_density()).value <= 1e-4


def test_b_protocol_success_probability_dense_reference():
    d = 4
    rho = browne_state("b", 0.7, cutoff=d)
    _, prob = b_protocol_step(rho)
    big = np.kron(rho.matrix, rho.matrix)  # modes (A1,B1) fast, (A2,B2) slow
    t = big.reshape((d,) * 8)
    for a0, a1 in ((3, 1), (2, 0)):       # rows: (A1,A2) then (B1,B2)
        t = apply_beam_splitter_tensor(t, np.pi / 4, a0, a1)
        t = apply_beam_splitter_tensor(t, np.pi / 4, a0 + 4, a1 + 4)
    proj = t[0, 0, :, :, 0, 0, :, :]
    prob_dense = float(np.real(np.einsum("abab->", proj)))
    assert abs(prob - prob_dense) <= 1e-10


def test_b_protocol_run_records():
    trace = b_protocol_run(browne_state("a", 0.5), 3)
    assert [r["step"] for r in trace.steps] == [0, 1, 2, 3]
    assert trace.steps[1]["Delta_i"] > 0  # entanglement increases
    assert all(0 < r["success_prob"] <= 1 for r in trace.steps)
    csv = trace.to_csv()
    assert csv.splitlines()[0] == "step,success_prob,delta_B,E_N,Delta_i,leakage"

    # vacuum input: the gain is not applicable
    trace = b_protocol_run(vacuum(8, modes=2), 1)
    assert trace.steps[1]["Delta_i"] is None
    assert ",NA," in trace.to_csv().splitlines()[-1]


def test_b_protocol_window_widens():
    lams = np.linspace(0.05, 1.0, 12)
    counts = []
    for steps in (0, 5, 10):
        cnt = 0
        for lam in lams:
            if steps == 0:
                db = delta_b(browne_state("a", float(lam))).value
            else:
                run = b_protocol_run(browne_state("a", float(lam)), steps,
                                     leak_budget=None)
                db = run.steps[-1]["delta_B"]
            cnt += db <= 1e-2
        counts.append(cnt)
    assert counts[0] <= counts[1] <= counts[2] and counts[2] > counts[0]


def test_renormalized_ng():
    assert abs(max_two_mode_ng(2.0) - 4 * np.log(2)) < 1e-12
    tb = pnes(PNESSpec("twin_beam", 0.25, 10))
    assert renormalized_ng(tb) <= 1e-6
    d = 8
    amps = np.zeros(d * d, dtype=complex)
    amps[1 + d] = 1.0
    f11 = FockStateVector(2, d, amps)
    assert abs(renormalized_ng(f11) - 1.0) < 1e-9  # |1>|1> attains the ceiling
    with pytest.raises(ArgumentError):
        renormalized_ng(vacuum(6, modes=2))


def test_t_protocol():
    for r in (0.1, 0.8, 1.5):
        psi = t_protocol_output(r, "one")
        assert abs(delta_b(psi).value - 2 * np.log(2)) <= 1e-5
    mu, nu = np.cosh(0.8), np.sinh(0.8)
    v = np.zeros(40, dtype=complex)
    v[0], v[2] = mu, np.sqrt(2) * nu
    v /= np.linalg.norm(v)
    oracle = delta_b(FockStateVector(1, 40, v)).value
    psi2 = t_protocol_output(0.8, "two")
    assert abs(delta_b(psi2).value - oracle) <= 1e-5
    with pytest.raises(ArgumentError):
        t_protocol_output(0.0, "one")
    with pytest.raises(ArgumentError):
        t_protocol_output(0.5, "three")


def test_t_protocol_entanglement_trends():
    rs = (0.1, 0.3, 0.6)
    en1 = [log_negativity(t_protocol_output(r, "one")) for r in rs]
    en2 = [log_negativity(t_protocol_output(r, "two")) for r in rs]
    db2 = [delta_b(t_protocol_output(r, "two")).value for r in rs]
    assert all(b > a for a, b in zip(en1, en1[1:]))   # entanglement grows with r
    assert all(b > a for a, b in zip(en2, en2[1:]))
    assert all(b > a for a, b in zip(db2, db2[1:]))   # two-photon nG grows too


def test_branch_ensemble_round_trip():
    rho = browne_state("b", 0.6)
    ens = BranchEnsemble.from_state(rho)
    assert ens.rank == 2
    back = ens.to_density()
    assert np.max(np.abs(back.matrix - rho.matrix)) < 1e-10
