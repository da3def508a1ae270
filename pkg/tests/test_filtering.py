import math

import numpy as np
import pytest

import config
from conftest import random_spectrum
from errors import DimensionError, ParameterError
from filtering import (
    FilterH,
    filter_signal,
    filter_signal_with_residual,
    gradient_descent,
    grid_search,
    loss,
    objective,
    param_gradient,
    real_loss_gap,
    reconstruction_loss,
    wiener_h,
)
from rotations import AxisKind, RotationSpec
from spectral import TransformKind, build_operator, build_spectrum

PATH2 = [[1.0, -1.0], [-1.0, 1.0]]
SMALL_THETAS = (0.0, 1.2566, 2.5133)
SMALL_ALPHAS = (0.0, 0.5, 1.0)


def _signals(n, seed, noise=0.3):
  rng = np.random.default_rng(seed)
  x = np.sin(np.linspace(0, 2 * math.pi, n)) + 0.5
  return x + noise * rng.standard_normal(n), x


def test_wiener_identity_and_scaling(spec4, rng):
  x = rng.standard_normal(4)
  op = build_operator(spec4, "agfrft_i", RotationSpec(theta=0.7), 0.4)
  np.testing.assert_allclose(wiener_h(op, x, x).h, np.ones(4), atol=1e-12)
  np.testing.assert_allclose(wiener_h(op, 2 * x, x).h, np.full(4, 0.5), atol=1e-12)


def test_wiener_zero_coefficient_gets_zero_gain():
  spec = build_spectrum(PATH2)
  op = build_operator(spec, "gft")
  h = wiener_h(op, [1.0, 1.0], [2.0, 0.5])
  assert h.h[1] == 0.0
  assert h.h[0] == pytest.approx(1.25)


def test_filter_signal_identities(spec4, rng):
  y = rng.standard_normal(4)
  op = build_operator(spec4, "agfrft_ii", RotationSpec(theta=2.0), 0.3)
  np.testing.assert_allclose(filter_signal(op, FilterH.ones(4), y), y, atol=1e-9)
  np.testing.assert_allclose(filter_signal(op, np.zeros(4), y), np.zeros(4), atol=0)
  spec = build_spectrum(PATH2)
  out = filter_signal(build_operator(spec, "gft"), [1.0, 0.0], [1.0, -1.0])
  np.testing.assert_allclose(out, [0.0, 0.0], atol=1e-12)
  with pytest.raises(DimensionError):
    filter_signal(op, np.ones(3), y)


def test_filter_residual_is_zero_for_real_operators(spec4, rng):
  y = rng.standard_normal(4)
  op = build_operator(spec4, "agft", RotationSpec(theta=1.1))
  _, imag = filter_signal_with_residual(op, rng.standard_normal(4), y)
  assert imag <= 1e-12


def test_loss_values(spec4, rng):
  y, x = rng.standard_normal(4), rng.standard_normal(4)
  val = loss(spec4, "agfrft_i", "yaw", "df", np.ones(4), 0.5, 0.5, 1.0, y, x)
  assert val == pytest.approx(float((y - x) @ (y - x)), abs=1e-8)
  op = build_operator(spec4, "gfrft", alpha=0.3)
  assert reconstruction_loss(op, wiener_h(op, x, x), x, x) <= 1e-12
  assert loss(spec4, "agft", "roll", "legacy", rng.standard_normal(4), 2.0, 1.0, 1.0, y, x) >= 0.0


WIENER_OP = RotationSpec(AxisKind.PITCH, theta=0.9)


def _perturbation_deltas(op, h, y, x, measure):
  base = measure(op, h, y, x)
  deltas = []
  for k in range(len(h)):
    for step in (1e-3, -1e-3):
      hp = h.copy()
      hp[k] += step
      deltas.append(measure(op, hp, y, x) - base)
  return deltas


def test_wiener_minimizes_spectral_objective_all_kinds():
  # ‖diag(h)·ŷ − x̂‖² (resíduo complexo), para os cinco tipos
  for seed in range(10):
    spec = random_spectrum(8, 100 + seed)
    y, x = _signals(8, seed)
    for kind in TransformKind:
      op = build_operator(spec, kind, WIENER_OP, 0.6)
      h = wiener_h(op, y, x).h
      assert min(_perturbation_deltas(op, h, y, x, objective)) >= -1e-12


def test_wiener_minimizes_real_loss_only_for_real_kernels():
  for seed in range(10):
    spec = random_spectrum(8, 100 + seed)
    y, x = _signals(8, seed)
    for kind in (TransformKind.GFT, TransformKind.AGFT):
      op = build_operator(spec, kind, WIENER_OP, 0.6)
      h = wiener_h(op, y, x).h
      assert min(_perturbation_deltas(op, h, y, x, reconstruction_loss)) >= -1e-12


def test_fractional_kinds_leave_a_real_loss_gap():
  worst_gap, reductions = 0.0, 0
  for seed in range(10):
    spec = random_spectrum(8, 100 + seed)
    y, x = _signals(8, seed)
    for kind in (TransformKind.GFRFT, TransformKind.AGFRFT_I, TransformKind.AGFRFT_II):
      op = build_operator(spec, kind, WIENER_OP, 0.6)
      wl, best = real_loss_gap(op, y, x)
      assert best <= wl + 1e-12
      assert wl == pytest.approx(reconstruction_loss(op, wiener_h(op, y, x), y, x))
      worst_gap = max(worst_gap, wl - best)
      h = wiener_h(op, y, x).h
      reductions += sum(d < -1e-12 for d in _perturbation_deltas(op, h, y, x, reconstruction_loss))
  assert worst_gap > 1e-6
  assert reductions > 0


def test_real_loss_gap_vanishes_for_real_kernels(spec4, rng):
  y, x = rng.standard_normal(4), rng.standard_normal(4)
  for kind in ("gft", "agft"):
    wl, best = real_loss_gap(build_operator(spec4, kind, RotationSpec(theta=1.1)), y, x)
    assert wl == pytest.approx(best, abs=1e-10)


def test_grid_sizes_default():
  thetas, alphas = config.theta_grid(), config.alpha_grid()
  assert len(thetas) == 11 and len(alphas) == 11
  assert thetas[0] == 0.0 and thetas[-1] == pytest.approx(2 * math.pi)
  assert thetas[4] == pytest.approx(2.513, abs=1e-3)
  assert alphas[3] == 0.3 and alphas[-1] == 1.0


def test_grid_search_noiseless_is_exact(spec4, rng):
  x = rng.standard_normal(4)
  res = grid_search(spec4, "agfrft_ii", "yaw", "df", x, x, SMALL_THETAS, SMALL_ALPHAS)
  assert res.mse <= 1e-20
  np.testing.assert_allclose(res.estimate, x, atol=1e-10)


def test_grid_search_reductions_and_dominance(spectra8):
  for i, spec in enumerate(spectra8):
    y, x = _signals(8, i)
    thetas, alphas = config.theta_grid(), config.alpha_grid()
    gf = grid_search(spec, "gfrft", None, None, y, x, thetas, alphas)
    # θ = 0 fixo reproduz o GFRFT bit a bit
    red = grid_search(spec, "agfrft_i", "roll", "df", y, x, [0.0], alphas)
    assert red.mse == gf.mse and red.alpha == gf.alpha
    assert np.array_equal(red.h.h, gf.h.h)
    for kind in ("agfrft_i", "agfrft_ii"):
      for axis in AxisKind:
        res = grid_search(spec, kind, axis, "df", y, x, thetas, alphas)
        assert res.mse <= gf.mse
        assert res.kind is TransformKind(kind) and res.axis is axis


def test_grid_search_gfrft_ignores_theta_grid(spec4, rng):
  y, x = rng.standard_normal(4), rng.standard_normal(4)
  res = grid_search(spec4, "gfrft", "roll", "legacy", y, x, SMALL_THETAS, SMALL_ALPHAS)
  assert res.theta == 0.0 and res.axis is None and res.family is None
  agft = grid_search(spec4, "agft", "roll", "df", y, x, SMALL_THETAS, SMALL_ALPHAS)
  assert agft.alpha == 1.0


def test_grid_search_threads_deterministic(spectra8):
  spec = spectra8[0]
  y, x = _signals(8, 5)
  a = grid_search(spec, "agfrft_ii", "pitch", "df", y, x, config.theta_grid(), config.alpha_grid())
  b = grid_search(spec, "agfrft_ii", "pitch", "df", y, x, config.theta_grid(), config.alpha_grid(), threads=4)
  assert (a.theta, a.alpha, a.mse) == (b.theta, b.alpha, b.mse)
  assert np.array_equal(a.h.h, b.h.h)


def test_grid_search_validation(spec4):
  x = np.ones(4)
  with pytest.raises(ParameterError):
    grid_search(spec4, "agfrft_i", "yaw", "df", x, x, [], SMALL_ALPHAS)
  with pytest.raises(DimensionError):
    grid_search(spec4, "gft", None, None, np.ones(3), x, SMALL_THETAS, SMALL_ALPHAS)
  with pytest.raises(DimensionError):
    grid_search(spec4, "gft", None, None, x, x, SMALL_THETAS, SMALL_ALPHAS, observation=np.eye(3))
  res = grid_search(spec4, "gft", None, None, x, x, SMALL_THETAS, SMALL_ALPHAS, observation=np.eye(4))
  assert res.mse <= 1e-20


def test_gradient_descent_noiseless_stays_at_zero(spec4, rng):
  x = rng.standard_normal(4)
  res = gradient_descent(spec4, "agfrft_i", "yaw", "df", x, x, epochs=5)
  assert len(res.trace) == 5
  assert all(e.loss <= 1e-20 for e in res.trace)


def test_gradient_descent_best_so_far_never_worse(spectra8):
  for i, spec in enumerate(spectra8):
    y, x = _signals(8, 20 + i)
    for kind in ("agfrft_i", "agfrft_ii"):
      res = gradient_descent(spec, kind, "yaw", "df", y, x)
      best = [e.best_loss for e in res.trace]
      assert len(res.trace) == config.EPOCHS
      assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
      assert best[-1] <= res.trace[0].loss
      assert res.mse == pytest.approx(best[-1] / 8)


def test_gradient_descent_active_parameters(spec4, rng):
  y, x = rng.standard_normal(4), rng.standard_normal(4)
  gfr = gradient_descent(spec4, "gfrft", None, None, y, x, epochs=3)
  assert all(e.theta == 0.0 and e.kappa == 1.0 for e in gfr.trace)
  agft = gradient_descent(spec4, "agft", "roll", "legacy", y, x, epochs=3)
  assert all(e.alpha == 1.0 and e.kappa == 1.0 for e in agft.trace)
  gft = gradient_descent(spec4, "gft", None, None, y, x, epochs=3)
  assert all((e.theta, e.alpha, e.kappa) == (0.0, 1.0, 1.0) for e in gft.trace)


def test_gradient_descent_validation(spec4):
  x = np.ones(4)
  with pytest.raises(ParameterError):
    gradient_descent(spec4, "gfrft", None, None, x, x, lr=0.0)
  with pytest.raises(ParameterError):
    gradient_descent(spec4, "gfrft", None, None, x, x, epochs=0)


def test_param_gradient_step_halving_consistent(spectra8):
  spec = spectra8[1]
  y, x = _signals(8, 3)
  h = np.linspace(0.5, 1.2, 8)
  for param in ("theta", "alpha", "kappa"):
    g1 = param_gradient(spec, "agfrft_i", "roll", "df", h, 0.7, 0.6, 1.0, y, x, param, 1e-5)
    g2 = param_gradient(spec, "agfrft_i", "roll", "df", h, 0.7, 0.6, 1.0, y, x, param, 5e-6)
    assert abs(g1 - g2) <= 1e-3 * max(abs(g1), abs(g2), 1e-4)
  with pytest.raises(ParameterError):
    param_gradient(spec, "gft", None, None, h, 0.0, 1.0, 1.0, y, x, "beta")


def test_filter_h_validation():
  with pytest.raises(ParameterError):
    FilterH([1.0, np.nan])
  assert len(FilterH.ones(3)) == 3
