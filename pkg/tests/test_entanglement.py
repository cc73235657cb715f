import numpy as np
import pytest

from bbrent.entanglement import (
    NotAStateError,
    SIGMAYY,
    concurrence,
    entanglement_of_formation,
    hermitian_eigen,
    psd_sqrt,
)

from conftest import haar_unitary, random_density_matrix, random_pure_product, wootters_oracle

BELL = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2.0


def test_sigmayy_pattern():
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[3, 0] = -1.0
    expected[1, 2] = expected[2, 1] = 1.0
    assert np.array_equal(SIGMAYY, expected)
    # really is sigma_y (x) sigma_y
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    assert np.max(np.abs(np.kron(sy, sy) - SIGMAYY)) == 0.0


def test_eigen_identity_quarter():
    dec = hermitian_eigen(np.eye(4, dtype=complex) / 4.0)
    assert np.allclose(dec.eigenvalues, 0.25, atol=1e-14)


def test_eigen_diagonal_descending():
    dec = hermitian_eigen(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex))
    assert np.allclose(dec.eigenvalues, [0.4, 0.3, 0.2, 0.1], atol=1e-14)


def test_eigen_recovers_known_spectrum(rng):
    for _ in range(50):
        u = haar_unitary(rng, 4)
        d = np.sort(rng.uniform(-2, 2, size=4))[::-1]
        h = (u * d) @ u.conj().T
        dec = hermitian_eigen(0.5 * (h + h.conj().T))
        assert np.max(np.abs(dec.eigenvalues - d)) < 1e-12


def test_eigen_reconstruction_and_orthonormality(rng):
    for _ in range(50):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = a + a.conj().T
        dec = hermitian_eigen(h)
        rec = dec.eigenvectors @ np.diag(dec.eigenvalues) @ dec.eigenvectors.conj().T
        assert np.max(np.abs(rec - h)) < 1e-12 * max(1.0, np.max(np.abs(h)))
        gram = dec.eigenvectors.conj().T @ dec.eigenvectors
        assert np.max(np.abs(gram - np.eye(4))) < 1e-12


def test_eigen_phase_convention_deterministic(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    d1 = hermitian_eigen(h)
    d2 = hermitian_eigen(h.copy())
    assert np.array_equal(d1.eigenvectors, d2.eigenvectors)
    for col in d1.eigenvectors.T:
        first = col[np.abs(col) > 1e-8][0]
        assert abs(first.imag) < 1e-12 and first.real > 0.0


def test_eigen_rejects_non_hermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ValueError):
        hermitian_eigen(m)


def test_psd_sqrt_identity_and_projector():
    assert np.allclose(psd_sqrt(np.eye(4, dtype=complex) / 4.0),
                       np.eye(4) / 2.0, atol=1e-12)
    assert np.max(np.abs(psd_sqrt(BELL.astype(complex)) - BELL)) < 1e-12


def test_psd_sqrt_squares_back(rng):
    for _ in range(30):
        rho = random_density_matrix(rng)
        root = psd_sqrt(rho)
        assert np.max(np.abs(root @ root - rho)) < 1e-10
        assert np.max(np.abs(root - root.conj().T)) < 1e-12


def test_psd_sqrt_rejects_negative():
    m = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    with pytest.raises(NotAStateError):
        psd_sqrt(m)


def test_concurrence_bell_exact():
    assert concurrence(BELL.astype(complex)) == pytest.approx(1.0, abs=1e-12)


def test_concurrence_product_states(rng):
    worst = max(concurrence(random_pure_product(rng)) for _ in range(200))
    assert worst <= 1e-10


def test_concurrence_werner_closed_form():
    for p in np.linspace(0.0, 1.0, 21):
        w = p * BELL + (1.0 - p) * np.eye(4) / 4.0
        expected = max(0.0, (3.0 * p - 1.0) / 2.0)
        assert concurrence(w.astype(complex)) == pytest.approx(expected, abs=1e-10)


def test_concurrence_matches_independent_oracle(rng):
    for _ in range(100):
        rho = random_density_matrix(rng)
        assert concurrence(rho) == pytest.approx(wootters_oracle(rho), abs=1e-10)


def test_concurrence_local_unitary_invariance(rng):
    for _ in range(25):
        rho = random_density_matrix(rng)
        u = np.kron(haar_unitary(rng), haar_unitary(rng))
        rotated = u @ rho @ u.conj().T
        assert concurrence(rotated) == pytest.approx(concurrence(rho), abs=1e-10)


def test_concurrence_conjugation_invariance(rng):
    for _ in range(25):
        rho = random_density_matrix(rng)
        assert concurrence(rho.conj()) == pytest.approx(concurrence(rho), abs=1e-12)


def test_wootters_eigenvalues_real_nonnegative(rng):
    for _ in range(100):
        rho = random_density_matrix(rng)
        yy = SIGMAYY
        lam = np.linalg.eigvals(rho @ (yy @ rho.conj() @ yy))
        assert np.max(np.abs(lam.imag)) < 1e-10
        assert np.min(lam.real) > -1e-10


def test_concurrence_rejects_invalid():
    with pytest.raises(NotAStateError):
        concurrence(np.eye(4, dtype=complex))   # trace 4
    bad = np.eye(4, dtype=complex) / 4.0
    bad[0, 1] = 0.3   # not Hermitian
    with pytest.raises(NotAStateError):
        concurrence(bad)


def test_eof_extremes():
    assert entanglement_of_formation(BELL.astype(complex)) == pytest.approx(1.0, abs=1e-12)
    assert entanglement_of_formation(np.eye(4, dtype=complex) / 4.0) == 0.0


def test_eof_werner_half():
    w = 0.5 * BELL + 0.5 * np.eye(4) / 4.0
    assert entanglement_of_formation(w.astype(complex)) == pytest.approx(0.11762, abs=1e-4)


def test_eof_monotone_in_concurrence():
    # Werner family sweeps C through (0, 1]; E must increase strictly
    ps = np.linspace(0.34, 1.0, 100)
    es = [
        entanglement_of_formation((p * BELL + (1 - p) * np.eye(4) / 4.0).astype(complex))
        for p in ps
    ]
    assert all(b > a for a, b in zip(es, es[1:]))
