import math

import numpy as np
import pytest

from conftest import random_spectrum
from errors import DimensionError, ParameterError
from matcore import sym_eig, unitarity_residual
from rotations import AxisKind, Family, RotationSpec, givens2, rotation_matrix
from spectral import (
    GraphSpectrum,
    OperatorCache,
    TransformKind,
    apply,
    apply_inverse,
    build_operator,
    build_spectrum,
    parse_kind,
    spectral_concentration,
)

GRID = (0.0, 0.7, 1.4, 2.9, 5.0)
ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def _rot(theta, axis=AxisKind.YAW, family=Family.DEGENERACY_FRIENDLY):
  return RotationSpec(axis, family, theta)


def _fro(a):
  return float(np.linalg.norm(a, 'fro'))


def test_gft_of_small_graphs():
  assert np.array_equal(build_spectrum(np.eye(2)).gft, np.eye(2))
  s = 1 / math.sqrt(2)
  f = build_spectrum([[1.0, -1.0], [-1.0, 1.0]]).gft
  np.testing.assert_allclose(f, [[s, s], [s, -s]], atol=1e-12)
  assert np.array_equal(build_spectrum(np.zeros((3, 3))).gft, np.eye(3))


def test_gfrft_endpoints(spec4):
  assert np.array_equal(build_operator(spec4, "gfrft", alpha=0.0).forward, np.eye(4))
  np.testing.assert_allclose(build_operator(spec4, "gfrft", alpha=1.0).forward, spec4.gft, atol=1e-10)


def test_gfrft_of_rotation_matrix_gft():
  spec = GraphSpectrum(gso=np.eye(2), eig=sym_eig(np.eye(2)), gft=givens2(math.pi / 3))
  op = build_operator(spec, "gfrft", alpha=0.5)
  np.testing.assert_allclose(op.forward, givens2(math.pi / 6), atol=1e-12)


def test_agft_theta_zero_equals_gft(spec4):
  op = build_operator(spec4, "agft", _rot(0.0))
  assert np.array_equal(op.forward, spec4.gft.astype(complex))


def test_agft_legacy_theta_zero_differs_from_gft(spec4):
  op = build_operator(spec4, "agft", _rot(0.0, AxisKind.ROLL, Family.LEGACY))
  assert _fro(op.forward - spec4.gft) > 0.1 * _fro(spec4.gft)


def test_agft_two_nodes_half_turn():
  spec = build_spectrum([[1.0, -1.0], [-1.0, 1.0]])
  op = build_operator(spec, "agft", _rot(math.pi))
  np.testing.assert_allclose(op.forward, spec.gft @ givens2(math.pi).T, atol=1e-12)


def test_reduction_chain(spec4):
  for alpha in ALPHAS:
    g = build_operator(spec4, "gfrft", alpha=alpha).forward
    assert np.array_equal(build_operator(spec4, "agfrft_i", _rot(0.0), alpha).forward, g)
    assert np.array_equal(build_operator(spec4, "agfrft_ii", _rot(0.0), alpha).forward, g)
  for theta in GRID:
    for axis in AxisKind:
      a = build_operator(spec4, "agft", _rot(theta, axis)).forward
      i1 = build_operator(spec4, "agfrft_i", _rot(theta, axis), 1.0).forward
      i2 = build_operator(spec4, "agfrft_ii", _rot(theta, axis), 1.0).forward
      np.testing.assert_allclose(i1, a, atol=1e-10)
      np.testing.assert_allclose(i2, a, atol=1e-10)
  ident = build_operator(spec4, "agfrft_i", _rot(0.0), 0.0).forward
  assert np.array_equal(ident, np.eye(4))


def test_unitarity_and_exact_inverse_on_random_graphs():
  worst_u, worst_inv = 0.0, 0.0
  for n in (4, 5, 8, 16):
    for seed in (0, 1):
      spec = random_spectrum(n, seed)
      eye = np.eye(n)
      for kind in TransformKind:
        for theta in GRID:
          for alpha in ALPHAS:
            op = build_operator(spec, kind, _rot(theta), alpha)
            worst_u = max(worst_u, unitarity_residual(op.forward))
            worst_inv = max(worst_inv, _fro(op.forward @ op.inverse - eye))
  assert worst_u <= 1e-9
  assert worst_inv <= 1e-9


def test_parseval_and_round_trip(spec4, rng):
  x = rng.standard_normal(4)
  for kind in TransformKind:
    op = build_operator(spec4, kind, _rot(1.4, AxisKind.PITCH), 0.6)
    xh = apply(op, x)
    assert abs(np.linalg.norm(xh) - np.linalg.norm(x)) <= 1e-9
    np.testing.assert_allclose(apply_inverse(op, xh), x, atol=1e-8)


def test_type_i_additive_type_ii_not(spec4):
  add_i, add_ii = 0.0, 0.0
  for theta in GRID[1:]:
    for a1 in ALPHAS[1:]:
      for a2 in ALPHAS[1:]:
        for kind in ("agfrft_i", "agfrft_ii"):
          lhs = (build_operator(spec4, kind, _rot(theta), a1).forward
                 @ build_operator(spec4, kind, _rot(theta), a2).forward)
          err = _fro(lhs - build_operator(spec4, kind, _rot(theta), a1 + a2).forward)
          if kind == "agfrft_i":
            add_i = max(add_i, err)
          else:
            add_ii = max(add_ii, err)
  assert add_i <= 1e-9
  assert add_ii > 1e-4


def test_type_ii_naive_inverse_is_not_the_inverse(spec4):
  worst = 0.0
  for axis in AxisKind:
    rot = _rot(1.0, axis)
    op = build_operator(spec4, "agfrft_ii", rot, 0.5)
    naive = spec4.gft_eig.power(-0.5) @ rotation_matrix(rot, 4).T
    worst = max(worst, _fro(op.forward @ naive - np.eye(4)))
  assert worst > 1e-6


def test_constant_signal_concentrates_on_zero_frequency(spec4):
  op = build_operator(spec4, "gft")
  xh = apply(op, np.full(4, 3.0))
  np.testing.assert_allclose(xh, [6.0, 0.0, 0.0, 0.0], atol=1e-10)
  assert spectral_concentration(op, np.full(4, 3.0), 1) == pytest.approx(1.0)


def test_identity_operator_and_dimension_errors(spec4):
  op = build_operator(spec4, "gfrft", alpha=0.0)
  x = np.array([1.0, -2.0, 0.5, 4.0])
  assert np.array_equal(apply(op, x), x.astype(complex))
  with pytest.raises(DimensionError):
    apply(op, np.ones(3))
  with pytest.raises(DimensionError):
    apply_inverse(op, np.ones((4, 1)))


def test_spectral_concentration_bounds(spec4, rng):
  op = build_operator(spec4, "agfrft_ii", _rot(0.7), 0.3)
  x = rng.standard_normal(4)
  assert spectral_concentration(op, x, 4) == pytest.approx(1.0)
  assert 0.0 < spectral_concentration(op, x, 1) <= 1.0
  assert spectral_concentration(op, np.zeros(4), 2) == 1.0
  for k in (0, 5):
    with pytest.raises(ParameterError):
      spectral_concentration(op, x, k)


def test_parse_kind_and_flags():
  assert parse_kind("agfrft-ii") is TransformKind.AGFRFT_II
  assert parse_kind("GFT") is TransformKind.GFT
  assert TransformKind.AGFT.uses_rotation and not TransformKind.AGFT.uses_alpha
  assert TransformKind.GFRFT.uses_alpha and not TransformKind.GFRFT.uses_rotation
  with pytest.raises(ParameterError):
    parse_kind("fft")


def test_operator_cache_hits_and_eviction(spec4):
  cache = OperatorCache(maxsize=2)
  a = cache.get(spec4, "agfrft_i", _rot(0.5), 0.3)
  assert cache.get(spec4, "agfrft_i", _rot(0.5), 0.3) is a
  assert (cache.hits, cache.misses) == (1, 1)
  # alpha ignorado para agft, rotação ignorada para gfrft
  g1 = cache.get(spec4, "agft", _rot(0.5), 0.1)
  assert cache.get(spec4, "agft", _rot(0.5), 0.9) is g1
  cache.get(spec4, "gfrft", None, 0.4)
  assert cache.get(spec4, "gfrft", _rot(1.0), 0.4).kind is TransformKind.GFRFT
  assert len(cache._data) == 2
  assert cache.get(spec4, "agfrft_i", _rot(0.5), 0.3) is not a
