import math

import numpy as np
import pytest

from errors import DimensionError, SymmetryError, UnitarityError
from matcore import expm_skew, frac_power_unitary, principal_phases, sym_eig, unitary_eig
from rotations import givens2


def test_sym_eig_1x1_zero():
  e = sym_eig([[0.0]])
  assert e.eigenvalues.tolist() == [0.0]
  assert e.eigenvectors.tolist() == [[1.0]]


def test_sym_eig_path_laplacian_sign_convention():
  e = sym_eig([[1.0, -1.0], [-1.0, 1.0]])
  np.testing.assert_allclose(e.eigenvalues, [0.0, 2.0], atol=1e-12)
  s = 1 / math.sqrt(2)
  np.testing.assert_allclose(e.eigenvectors[:, 0], [s, s], atol=1e-12)
  np.testing.assert_allclose(e.eigenvectors[:, 1], [s, -s], atol=1e-12)


def test_sym_eig_identity_basis():
  e = sym_eig(np.eye(4))
  np.testing.assert_allclose(e.eigenvalues, np.ones(4))
  np.testing.assert_allclose(e.eigenvectors, np.eye(4))


def test_sym_eig_reconstruction_and_frozen(lap4):
  e = sym_eig(lap4)
  v = e.eigenvectors
  assert np.all(np.diff(e.eigenvalues) >= 0)
  np.testing.assert_allclose(v @ np.diag(e.eigenvalues) @ v.T, lap4, atol=1e-12)
  np.testing.assert_allclose(v.T @ v, np.eye(4), atol=1e-12)
  with pytest.raises(ValueError):
    v[0, 0] = 5.0


def test_sym_eig_rejects_bad_input():
  with pytest.raises(SymmetryError):
    sym_eig([[0.0, 1.0], [0.0, 0.0]])
  with pytest.raises(DimensionError):
    sym_eig(np.ones((2, 3)))
  with pytest.raises(DimensionError):
    sym_eig([[np.nan]])


def test_unitary_eig_rotation_phases():
  e = unitary_eig(givens2(math.pi / 3))
  np.testing.assert_allclose(e.phases, [-math.pi / 3, math.pi / 3], atol=1e-12)
  np.testing.assert_allclose(np.abs(e.eigenvalues), [1.0, 1.0], atol=1e-15)


def test_unitary_eig_minus_one_goes_to_plus_pi():
  e = unitary_eig(np.diag([1.0, -1.0]))
  np.testing.assert_allclose(e.phases, [0.0, math.pi], atol=1e-12)
  assert principal_phases([complex(-1.0, 0.0), complex(-1.0, -0.0)]).tolist() == [math.pi, math.pi]


def test_unitary_eig_rejects_non_unitary():
  with pytest.raises(UnitarityError) as exc:
    unitary_eig(np.array([[2.0, 0.0], [0.0, 1.0]]))
  assert exc.value.residual > 1.0


def test_unitary_eig_eigenvectors_unitary_with_repeated_eigenvalues():
  e = unitary_eig(np.eye(3))
  v = e.eigenvectors
  np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_expm_skew_zero_angle_is_exact_identity():
  j = np.array([[0.0, -1.0], [1.0, 0.0]])
  assert np.array_equal(expm_skew(j, 0.0), np.eye(2))


def test_expm_skew_closed_form_2x2():
  j = np.array([[0.0, -1.0], [1.0, 0.0]])
  phi = 0.7
  expected = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
  np.testing.assert_allclose(expm_skew(j, phi), expected, atol=1e-14)
  np.testing.assert_allclose(expm_skew(np.zeros((3, 3)), 2.0), np.eye(3), atol=1e-15)


def test_expm_skew_rejects_non_skew():
  with pytest.raises(SymmetryError):
    expm_skew(np.eye(2), 1.0)


def test_expm_skew_orthogonal_random():
  rng = np.random.default_rng(7)
  worst_o, worst_d = 0.0, 0.0
  for _ in range(100):
    n = int(rng.integers(2, 33))
    a = rng.standard_normal((n, n)) / math.sqrt(n)
    o = expm_skew(a - a.T, float(rng.uniform(-1, 1)))
    worst_o = max(worst_o, np.linalg.norm(o.T @ o - np.eye(n), 'fro'))
    worst_d = max(worst_d, abs(np.linalg.det(o) - 1.0))
  assert worst_o <= 1e-10
  assert worst_d <= 1e-8


def test_expm_skew_derivative_matches_finite_difference():
  rng = np.random.default_rng(3)
  a = rng.standard_normal((3, 3))
  j = a - a.T
  phi, h = 0.4, 1e-5
  fd = (expm_skew(j, phi + h) - expm_skew(j, phi - h)) / (2 * h)
  np.testing.assert_allclose(fd, j @ expm_skew(j, phi), atol=1e-5)


def test_frac_power_anchor_half_rotation():
  half = frac_power_unitary(givens2(math.pi / 3), 0.5)
  np.testing.assert_allclose(half, givens2(math.pi / 6), atol=1e-12)


def test_frac_power_semigroup_and_endpoints():
  q = givens2(1.1)
  e = unitary_eig(q)
  np.testing.assert_allclose(e.power(0.3) @ e.power(0.45), e.power(0.75), atol=1e-12)
  np.testing.assert_allclose(e.power(1.0), q, atol=1e-12)
  assert np.array_equal(e.power(0.0), np.eye(2))
  p = e.power(0.37)
  np.testing.assert_allclose(p.conj().T @ p, np.eye(2), atol=1e-12)
