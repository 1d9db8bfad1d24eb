import json

import numpy as np
import pytest

from nongauss import (ArgumentError, DensityMatrix, FockStateVector,
                      NumericalValidityError, overlap, partial_trace,
                      partial_transpose, purity, random_density_matrix, tensor,
                      von_neumann_entropy)
from nongauss.states import fock, thermal, vacuum


def haar_unitary(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_vector_invariants():
    with pytest.raises(ArgumentError):
        FockStateVector(1, 4, np.ones(5))
    with pytest.raises(NumericalValidityError):
        FockStateVector(1, 4, np.ones(4))  # norm 2


def test_density_invariants():
    mat = np.diag([0.6, 0.4]).astype(complex)
    mat[0, 1] = 0.1
    with pytest.raises(NumericalValidityError):
        DensityMatrix(1, 2, mat)  # not Hermitian
    with pytest.raises(NumericalValidityError):
        DensityMatrix(1, 2, np.diag([0.7, 0.4]).astype(complex))  # trace 1.1


def test_tensor_product():
    v2 = vacuum(4).density()
    two = tensor(v2, v2)
    assert two.modes == 2 and abs(np.trace(two.matrix) - 1) < 1e-12
    ft = tensor(fock(1, 4).density(), thermal(0.0, 4))
    # |1>|0>: occupied flat index is n0=1, n1=0 -> 1
    assert abs(ft.matrix[1, 1] - 1.0) < 1e-12


def test_tensor_purity_multiplicative():
    rng = np.random.default_rng(11)
    for _ in range(5):
        a = random_density_matrix(1, 3, 2, rng)
        b = random_density_matrix(1, 3, 3, rng)
        assert abs(purity(tensor(a, b)) - purity(a) * purity(b)) < 1e-12


def test_partial_trace_recovers_factors():
    rng = np.random.default_rng(3)
    a = random_density_matrix(1, 4, 2, rng)
    b = random_density_matrix(1, 4, 3, rng)
    ab = tensor(a, b)
    assert np.max(np.abs(partial_trace(ab, {0}).matrix - a.matrix)) <= 1e-12
    assert np.max(np.abs(partial_trace(ab, {1}).matrix - b.matrix)) <= 1e-12
    with pytest.raises(ArgumentError):
        partial_trace(ab, set())


def test_partial_trace_twin_beam_thermal():
    # sum_n x^n |n,n> traces to a thermal-like diagonal with p_n ~ x^(2n)
    d, x = 10, 0.4
    amps = np.zeros(d * d, dtype=complex)
    amps[np.arange(d) * (d + 1)] = x ** np.arange(d)
    amps /= np.linalg.norm(amps)
    red = partial_trace(FockStateVector(2, d, amps).density(), {0})
    expect = (1 - x ** 2) * x ** (2 * np.arange(d))
    expect /= expect.sum()
    assert np.max(np.abs(np.real(np.diag(red.matrix)) - expect)) < 1e-12


def test_partial_transpose():
    d = 5
    amps = np.zeros(d * d, dtype=complex)
    amps[0] = amps[1 + d] = 1 / np.sqrt(2)
    bell = FockStateVector(2, d, amps).density()
    pt = partial_transpose(bell, 1)
    assert abs(np.linalg.eigvalsh(pt)[0] + 0.5) < 1e-12
    assert abs(np.trace(pt) - 1.0) < 1e-12
    # product states: transposing the diagonal factor changes nothing,
    # transposing the other factor transposes it alone
    a = random_density_matrix(1, 16, 2, seed=5)
    prod = tensor(a, thermal(0.3, 16))
    assert np.max(np.abs(partial_transpose(prod, 1) - prod.matrix)) < 1e-12
    diff = partial_transpose(prod, 0) - tensor(
        DensityMatrix(1, 16, a.matrix.T), thermal(0.3, 16)).matrix
    assert np.max(np.abs(diff)) < 1e-12
    with pytest.raises(ArgumentError):
        partial_transpose(a, 0)
    rng = np.random.default_rng(8)
    r2 = random_density_matrix(2, 3, 4, rng)
    assert abs(np.trace(partial_transpose(r2, 0)) - 1.0) < 1e-12


def test_purity_and_overlap():
    assert abs(purity(fock(1, 20)) - 1.0) < 1e-12
    assert abs(purity(thermal(1.0, 60)) - 1.0 / 3.0) < 1e-10
    assert abs(overlap(fock(1, 60).density(), thermal(1.0, 60)) - 0.25) < 1e-10
    assert overlap(fock(0, 10).density(), fock(1, 10).density()) < 1e-15
    rho = random_density_matrix(1, 6, 3, seed=1)
    assert abs(overlap(rho, rho) - purity(rho)) < 1e-12


def test_overlap_symmetry():
    rng = np.random.default_rng(2)
    a = random_density_matrix(1, 6, 4, rng)
    b = random_density_matrix(1, 6, 2, rng)
    assert abs(overlap(a, b) - overlap(b, a)) <= 1e-12


def test_von_neumann_entropy():
    assert von_neumann_entropy(fock(3, 10)) == 0.0
    assert abs(von_neumann_entropy(thermal(1.0, 60)) - 2 * np.log(2)) < 1e-10
    mixed = DensityMatrix(1, 4, np.diag([0.5, 0.5, 0, 0]).astype(complex))
    assert abs(von_neumann_entropy(mixed) - np.log(2)) < 1e-12
    assert abs(von_neumann_entropy(mixed, base=2) - 1.0) < 1e-12


def test_unitary_invariance():
    rng = np.random.default_rng(7)
    rho = random_density_matrix(1, 8, 3, rng)
    u = haar_unitary(8, rng)
    rot = DensityMatrix(1, 8, u @ rho.matrix @ u.conj().T)
    assert abs(purity(rot) - purity(rho)) < 1e-10
    assert abs(von_neumann_entropy(rot) - von_neumann_entropy(rho)) < 1e-10


def test_random_density_matrix():
    pure = random_density_matrix(1, 6, 1, seed=0)
    assert abs(purity(pure) - 1.0) < 1e-10
    r1 = random_density_matrix(1, 6, 3, seed=42)
    r2 = random_density_matrix(1, 6, 3, seed=42)
    assert np.array_equal(r1.matrix, r2.matrix)
    with pytest.raises(ArgumentError):
        random_density_matrix(1, 4, 5, seed=0)
    # mean purity at full rank decreases with dimension
    rng = np.random.default_rng(9)
    means = []
    for d in (2, 4, 8):
        means.append(np.mean([purity(random_density_matrix(1, d, d, rng))
                              for _ in range(200)]))
    assert means[0] > means[1] > means[2]


def test_json_round_trip():
    psi = fock(2, 6)
    assert np.array_equal(FockStateVector.from_json(psi.to_json()).amplitudes,
                          psi.amplitudes)
    rho = random_density_matrix(1, 5, 2, seed=3)
    back = DensityMatrix.from_json(rho.to_json())
    assert np.array_equal(back.matrix, rho.matrix)
    obj = json.loads(rho.to_json())
    assert set(obj) == {"modes", "cutoff", "re", "im", "leakage"}
