"""Acceptance suite: the headline guarantees of the lab, one test per
criterion, each at its pinned tolerance.  Every test prints a PASS line with
the measured quantities (visible under ``pytest -s`` or on failure), and the
same checks back ``delay-wave-lab verify``."""

import pytest

from delay_wave_lab import verification


def _assert(check):
    result = check()
    print(result.line())
    assert result.passed, result.detail


def test_criterion_01_exact_shift_identity():
    """A_shifted - A_original == -mu1*I entrywise, tolerance 0, 20 random draws."""
    _assert(verification.check_shift_identity)


def test_criterion_02_discrete_dissipativity():
    """Gram-symmetrized shifted and Kelvin-Voigt (mu <= a) generators: lam_max <= 1e-10."""
    _assert(verification.check_dissipativity)


def test_criterion_03_unconditional_energy_monotonicity():
    """E(t_{n+1}) <= E(t_n)*(1+1e-12) at dt in {0.01, 0.1, 1.0}, steep data, no overflow."""
    _assert(verification.check_energy_monotonicity)


def test_criterion_04_robin_eigenvalue_oracle():
    """C(0) = pi^2/4 and C(-1) = 0 within 1e-8; c_star = -1 within 1e-6; C increasing."""
    _assert(verification.check_robin_oracle)


def test_criterion_05_spectrum_location():
    """Shifted abscissa < 0; conjugation and exact spectral shift within 1e-10."""
    _assert(verification.check_spectrum_location)


def test_criterion_06_characteristic_root_oracle():
    """Smallest root matches cot(theta)=theta; eigenvalue error <= 5*dx and halves."""
    _assert(verification.check_characteristic_oracle)


def test_criterion_07_energy_vs_mu_classifications():
    """Shifted decays for mu in {1,2,4}; original grows for some mu in {1,2,4,8}."""
    _assert(verification.check_figure1_classifications)


def test_criterion_08_kelvin_voigt_decay():
    """Kelvin-Voigt decays for a = 1, mu in {0.25, 0.5, 0.75}."""
    _assert(verification.check_kelvin_voigt_decay)


def test_criterion_09_shift_consistency():
    """Original vs e^{mu1 t}*shifted residual halves (factor in [1.6, 2.4]) with dt."""
    _assert(verification.check_shift_consistency)


def test_criterion_10_resolvent_scan():
    """Resolvent norms finite, above the 1/dist bound (1e-8 slack); slope reported."""
    _assert(verification.check_resolvent_scan)


def test_criterion_11_polynomial_bound_consistency():
    """Tail power-law exponent of the shifted reference run is >= 0.5."""
    _assert(verification.check_polynomial_bound)
