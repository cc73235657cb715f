import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bbrent.entanglement import concurrence, entanglement_of_formation, hermitian_eigen
from bbrent.kernels import BathKernels, KernelQuery, Strategy, evaluate_kernels
from bbrent.params import PhysicalParams, derive_dimensionless
from bbrent.twoqubit import (
    COUPLING,
    DensityMatrix4,
    asymptotic_state,
    consistency_check_asymptotic,
    evolve,
    initial_product_state,
)

finite = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


def kernels(f1=0.0, f2=0.0, phi1=0.0, phi2=0.0):
    return BathKernels(f1=f1, f2=f2, phi1=phi1, phi2=phi2,
                       phi_minus=phi1 - phi2, error_estimate=0.0)


def test_coupling_matrices_exact_values():
    assert COUPLING.S.tolist() == [[0, 1, 1, 0], [1, 0, 4, 1], [1, 4, 0, 1], [0, 1, 1, 0]]
    assert COUPLING.C.tolist() == [[0, 1, 1, 4], [1, 0, 0, 1], [1, 0, 0, 1], [4, 1, 1, 0]]
    assert COUPLING.S_tilde.tolist() == [
        [0, -1, -1, 0], [1, 0, 0, 1], [1, 0, 0, 1], [0, -1, -1, 0]
    ]
    assert np.array_equal(COUPLING.C_tilde, -COUPLING.S_tilde)


def test_coupling_matrices_structure():
    assert np.array_equal(COUPLING.S, COUPLING.S.T)
    assert np.array_equal(COUPLING.C, COUPLING.C.T)
    for m in (COUPLING.S, COUPLING.C, COUPLING.S_tilde, COUPLING.C_tilde):
        assert np.all(np.diag(m) == 0)


def test_initial_product_state():
    rho = initial_product_state()
    assert np.all(rho.matrix == 0.25)
    assert np.trace(rho.matrix).real == 1.0
    assert concurrence(rho.matrix) <= 1e-12
    dec = hermitian_eigen(rho.matrix)
    assert dec.eigenvalues[0] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(np.abs(dec.eigenvectors[:, 0]) - 0.5)) < 1e-12


def test_zero_kernels_identity_map():
    rho = initial_product_state()
    out = evolve(rho, kernels(), A=0.3, gamma=0.7)
    assert np.array_equal(out.matrix, rho.matrix)


def test_populations_never_move():
    rho = initial_product_state()
    out = evolve(rho, kernels(2.0, 1.0, 5.0, 3.0), A=0.8, gamma=0.5)
    assert np.allclose(np.diag(out.matrix), 0.25, atol=1e-16)
    assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-14)


def test_strong_damping_entry_rates():
    # (01,10) is damped by exp(-4 A gamma f2), (00,11) by exp(-4 A f1)
    rho = initial_product_state()
    A, f1, f2 = 0.25, 3.0, 2.0
    out = evolve(rho, kernels(f1=f1, f2=f2), A=A, gamma=1.0)
    assert abs(out.matrix[1, 2]) == pytest.approx(0.25 * math.exp(-4 * A * f2), rel=1e-12)
    assert abs(out.matrix[0, 3]) == pytest.approx(0.25 * math.exp(-4 * A * f1), rel=1e-12)
    assert abs(out.matrix[0, 1]) == pytest.approx(
        0.25 * math.exp(-A * (f1 + f2)), rel=1e-12
    )


@given(finite, finite, finite, finite, st.floats(min_value=0.0, max_value=1.0))
def test_evolve_preserves_hermiticity_and_trace(f1, f2, p1, p2, gamma):
    out = evolve(initial_product_state(), kernels(f1, f2, p1, p2), A=0.02, gamma=gamma)
    m = out.matrix
    assert np.max(np.abs(m - m.conj().T)) < 1e-13
    assert abs(np.trace(m).real - 1.0) < 1e-14
    assert np.allclose(np.diag(m).real, 0.25, atol=1e-14)


def test_phase_sector_composition():
    rho = initial_product_state()
    k1 = kernels(phi1=0.4, phi2=0.1)
    k2 = kernels(phi1=1.1, phi2=0.7)
    ks = kernels(phi1=1.5, phi2=0.8)
    two_step = evolve(evolve(rho, k1, 1.0), k2, 1.0)
    one_step = evolve(rho, ks, 1.0)
    assert np.max(np.abs(two_step.matrix - one_step.matrix)) < 1e-13


def test_evolve_positivity_random_queries(rng):
    for _ in range(100):
        t = rng.uniform(0.1, 50.0)
        t0 = rng.uniform(0.5, 5.0)
        Y = rng.uniform(10.0, 100.0)
        k = evaluate_kernels(KernelQuery(t=t, t0=t0, y_max=Y))
        out = evolve(initial_product_state(), k, A=10 ** rng.uniform(-6, -1), gamma=1.0)
        assert out.min_eigenvalue() >= -1e-10


def test_evolve_domain_errors():
    rho = initial_product_state()
    with pytest.raises(ValueError):
        evolve(rho, kernels(), A=-0.1)
    with pytest.raises(ValueError):
        evolve(rho, kernels(), A=0.1, gamma=1.2)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix4(np.eye(4, dtype=complex))   # trace 4
    m = np.eye(4, dtype=complex) / 4.0
    m[0, 1] = 0.2
    with pytest.raises(ValueError):
        DensityMatrix4(m)


def test_asymptotic_pure_phase_is_maximally_entangling():
    st_ = asymptotic_state(0.0, math.pi / 2.0, initial_product_state())
    assert entanglement_of_formation(st_.matrix) == pytest.approx(1.0, abs=1e-9)
    assert concurrence(st_.matrix) == pytest.approx(1.0, abs=1e-9)


def test_asymptotic_zero_phase_stays_separable():
    for v in np.linspace(0.0, 80.0, 9):
        st_ = asymptotic_state(v, 0.0, initial_product_state())
        assert entanglement_of_formation(st_.matrix) <= 1e-12


def test_asymptotic_pi_periodic_concurrence(rng):
    for _ in range(10):
        v = rng.uniform(0.0, 40.0)
        phi = rng.uniform(0.0, math.pi)
        c1 = concurrence(asymptotic_state(v, phi, initial_product_state()).matrix)
        c2 = concurrence(asymptotic_state(v, phi + math.pi, initial_product_state()).matrix)
        assert c1 == pytest.approx(c2, abs=1e-10)


def test_asymptotic_phase_matches_evolve_construction():
    # asymptotic map == evolve() with f1 = f2 = ymax^2/6 under the
    # damping identification A ymax^2/6 = (alpha0/12 pi) v^2
    from bbrent.constants import CODATA2018
    from bbrent.twoqubit import damping_v_from_kernels

    A, Y, phim = 1e-7, 300.0, 0.9
    v = damping_v_from_kernels(A, Y)
    k = kernels(f1=Y**2 / 6.0, f2=Y**2 / 6.0, phi1=phim / A, phi2=0.0)
    direct = evolve(initial_product_state(), k, A, 1.0)
    asym = asymptotic_state(v, phim, initial_product_state(), CODATA2018.alpha0)
    assert np.max(np.abs(direct.matrix - asym.matrix)) < 1e-12


def test_asymptotic_domain():
    with pytest.raises(ValueError):
        asymptotic_state(-1.0, 0.0, initial_product_state())


def cmb_params(**kw):
    from bbrent.constants import CODATA2018

    base = dict(
        temperature_K=2.73,
        dipole_m=10e-9,
        separation_m=8.4e-2,
        omega_max=CODATA2018.e_charge / CODATA2018.hbar,
    )
    base.update(kw)
    return PhysicalParams(**base)


def test_consistency_check_in_regime():
    report = consistency_check_asymptotic(cmb_params(), t=1e8, t0=100.0)
    assert report["max_entry_difference"] < 1e-3


def test_consistency_check_preconditions():
    with pytest.raises(ValueError):
        consistency_check_asymptotic(cmb_params(), t=0.0, t0=100.0)
    with pytest.raises(ValueError):
        consistency_check_asymptotic(cmb_params(gamma=0.5), t=1e8, t0=100.0)
    with pytest.raises(ValueError):
        consistency_check_asymptotic(cmb_params(), t=1e8, t0=2.0)
