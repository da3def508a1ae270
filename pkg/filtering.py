# -*- coding: utf-8 -*-
"""filtering.py

Filtro de Wiener diagonal no domínio de qualquer transformada (gft ... agfrft_ii)
e os dois otimizadores de parâmetros:

  grid_search       varre θ (externo) × α (interno) com κ fixo; guarda só
                    melhoria estrita, então vence a PRIMEIRA célula mínima.
  gradient_descent  atualização simultânea de h e (θ, α, κ) com a mesma taxa;
                    gradiente de h analítico, dos ângulos por diferença central.
                    Devolve o melhor até então, não a última iteração.

Modelo de observação: y = x + ruído (G = I). `observation` é aceito por
compatibilidade e não altera a estimativa.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

import config
from errors import DimensionError, ParameterError
from rotations import AxisKind, Family, RotationSpec, parse_axis, parse_family
from spectral import (
    GraphSpectrum,
    OperatorCache,
    TransformKind,
    TransformOperator,
    apply,
    build_operator,
    parse_kind,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilterH:
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 1 or not np.all(np.isfinite(h)):
            raise ParameterError("filtro h deve ser vetor real finito")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def ones(cls, n: int) -> "FilterH":
        return cls(np.ones(n))

    def __len__(self) -> int:
        return self.h.shape[0]


class TraceEntry(NamedTuple):
    loss: float
    best_loss: float
    theta: float
    alpha: float
    kappa: float


@dataclass(frozen=True)
class OptResult:
    theta: float
    alpha: float
    kappa: float
    h: FilterH
    mse: float
    kind: TransformKind
    axis: AxisKind | None = None
    family: Family | None = None
    estimate: np.ndarray | None = None
    imag_residual: float = 0.0
    trace: tuple[TraceEntry, ...] = field(default_factory=tuple)


# ==========================
# Wiener / aplicação
# ==========================
def _signal(x, n: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.shape[0] != n:
        raise DimensionError(f"{name} de tamanho {v.shape} incompatível com N={n}")
    return v


def _as_filter(h, n: int) -> np.ndarray:
    arr = h.h if isinstance(h, FilterH) else np.asarray(h, dtype=float)
    if arr.shape != (n,):
        raise DimensionError(f"filtro de tamanho {arr.shape} incompatível com N={n}")
    return arr


def wiener_h(op: TransformOperator, y, x, eps: float = config.WIENER_EPS) -> FilterH:
    """h_k = Re(conj(ŷ_k)·x̂_k) / |ŷ_k|²; h_k = 0 quando |ŷ_k|² < eps."""
    yh = apply(op, _signal(y, op.n, "y"))
    xh = apply(op, _signal(x, op.n, "x"))
    power = yh.real ** 2 + yh.imag ** 2
    small = power < eps
    cross = (np.conj(yh) * xh).real
    return FilterH(np.where(small, 0.0, cross / np.where(small, 1.0, power)))


def filter_signal_with_residual(op: TransformOperator, h, y) -> tuple[np.ndarray, float]:
    """(Re(F⁻¹·diag(h)·F·y), ‖Im(...)‖₂)."""
    hv = _as_filter(h, op.n)
    z = op.inverse @ (hv * apply(op, _signal(y, op.n, "y")))
    return z.real.copy(), float(np.linalg.norm(z.imag))


def filter_signal(op: TransformOperator, h, y) -> np.ndarray:
    return filter_signal_with_residual(op, h, y)[0]


def objective(op: TransformOperator, h, y, x) -> float:
    """‖diag(h)·ŷ − x̂‖₂², o objetivo que wiener_h minimiza em h."""
    hv = _as_filter(h, op.n)
    r = hv * apply(op, _signal(y, op.n, "y")) - apply(op, _signal(x, op.n, "x"))
    return float(np.vdot(r, r).real)


def reconstruction_loss(op: TransformOperator, h, y, x) -> float:
    est = filter_signal(op, h, y)
    d = est - _signal(x, op.n, "x")
    return float(d @ d)


def real_loss_gap(op: TransformOperator, y, x) -> tuple[float, float]:
    """(perda real com h de Wiener, menor perda real atingível por um h real).

    A saída filtrada é linear em h: Re(F⁻¹·diag(ŷ))·h. O segundo valor sai de
    mínimos quadrados nessa matriz. Para GFT/AGFT os dois coincidem; nos tipos
    fracionários o h de Wiener minimiza o resíduo espectral complexo e pode
    ficar acima do mínimo da perda real.
    """
    yv, xv = _signal(y, op.n, "y"), _signal(x, op.n, "x")
    a = (op.inverse * apply(op, yv)[None, :]).real
    h_ls = np.linalg.lstsq(a, xv, rcond=None)[0]
    d = a @ h_ls - xv
    return reconstruction_loss(op, wiener_h(op, yv, xv), yv, xv), float(d @ d)


# ==========================
# Parametrização (θ, α, κ) -> operador
# ==========================
def _rotation(kind: TransformKind, axis, family, theta: float, kappa: float) -> RotationSpec | None:
    if not kind.uses_rotation:
        return None
    return RotationSpec(
        axis=parse_axis(axis) if axis is not None else AxisKind.YAW,
        family=parse_family(family) if family is not None else Family.DEGENERACY_FRIENDLY,
        theta=float(theta),
        kappa=float(kappa),
    )


def _operator(spec: GraphSpectrum, kind: TransformKind, axis, family, theta, alpha, kappa,
              cache: OperatorCache | None = None) -> TransformOperator:
    rot = _rotation(kind, axis, family, theta, kappa)
    if cache is not None:
        return cache.get(spec, kind, rot, alpha)
    return build_operator(spec, kind, rot, alpha)


def loss(spec: GraphSpectrum, kind, axis, family, h, theta: float, alpha: float, kappa: float, y, x) -> float:
    """‖Re(F⁻¹ diag(h) F y) − x‖₂² com F montado em (θ, α, κ)."""
    op = _operator(spec, parse_kind(kind), axis, family, theta, alpha, kappa)
    return reconstruction_loss(op, h, y, x)


# ==========================
# Grid search
# ==========================
def _axes_for(kind: TransformKind, axis, family):
    if not kind.uses_rotation:
        return None, None
    return (parse_axis(axis) if axis is not None else AxisKind.YAW,
            parse_family(family) if family is not None else Family.DEGENERACY_FRIENDLY)


def grid_search(spec: GraphSpectrum, kind, axis, family, y, x, theta_grid, alpha_grid,
                kappa: float = 1.0, observation=None, threads: int = 1,
                cache: OperatorCache | None = None) -> OptResult:
    kind = parse_kind(kind)
    n = spec.n
    y = _signal(y, n, "y")
    x = _signal(x, n, "x")
    thetas = [0.0] if not kind.uses_rotation else [float(t) for t in theta_grid]
    alphas = [1.0] if not kind.uses_alpha else [float(a) for a in alpha_grid]
    if not thetas or not alphas:
        raise ParameterError("grades de theta e alpha não podem ser vazias")
    if observation is not None and np.shape(observation) != (n, n):
        raise DimensionError(f"matriz de observação deve ser {n}×{n}")
    axis, family = _axes_for(kind, axis, family)

    def cell(ta):
        theta, alpha = ta
        op = _operator(spec, kind, axis, family, theta, alpha, kappa, cache)
        h = wiener_h(op, y, x)
        est, imag = filter_signal_with_residual(op, h, y)
        d = est - x
        return float(d @ d) / n, h, est, imag

    cells = [(t, a) for t in thetas for a in alphas]  # θ externo, α interno
    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            evaluated = list(ex.map(cell, cells))
    else:
        evaluated = [cell(c) for c in cells]

    best = 0
    best_mse = np.inf
    for i, (m, _h, _e, _im) in enumerate(evaluated):
        if m < best_mse:
            best, best_mse = i, m
    m, h, est, imag = evaluated[best]
    theta, alpha = cells[best]
    return OptResult(theta=theta, alpha=alpha, kappa=float(kappa), h=h, mse=m, kind=kind,
                     axis=axis, family=family, estimate=est, imag_residual=imag)


# ==========================
# Gradient descent
# ==========================
def _active_params(kind: TransformKind, family: Family | None) -> tuple[str, ...]:
    active = []
    if kind.uses_rotation:
        active.append("theta")
    if kind.uses_alpha:
        active.append("alpha")
    if kind.uses_rotation and family is Family.DEGENERACY_FRIENDLY:
        active.append("kappa")
    return tuple(active)


def param_gradient(spec: GraphSpectrum, kind, axis, family, h, theta: float, alpha: float, kappa: float,
                   y, x, param: str, step: float = config.FD_STEP) -> float:
    """∂loss/∂param por diferença central com h fixo."""
    if param not in ("theta", "alpha", "kappa"):
        raise ParameterError(f"parâmetro desconhecido: {param!r}")
    kind = parse_kind(kind)
    base = {"theta": float(theta), "alpha": float(alpha), "kappa": float(kappa)}
    plus = dict(base, **{param: base[param] + step})
    minus = dict(base, **{param: base[param] - step})
    lp = loss(spec, kind, axis, family, h, plus["theta"], plus["alpha"], plus["kappa"], y, x)
    lm = loss(spec, kind, axis, family, h, minus["theta"], minus["alpha"], minus["kappa"], y, x)
    return (lp - lm) / (2.0 * step)


def gradient_descent(spec: GraphSpectrum, kind, axis, family, y, x, init=None,
                     lr: float = config.LEARNING_RATE, epochs: int = config.EPOCHS,
                     fd_step: float = config.FD_STEP) -> OptResult:
    """init = (h0, θ0, α0, κ0); default: parâmetros da GFT (0, 1, 1) e h0 = Wiener neles."""
    if not lr > 0:
        raise ParameterError(f"taxa de aprendizado deve ser > 0 (recebido {lr})")
    if int(epochs) != epochs or epochs < 1:
        raise ParameterError(f"épocas deve ser inteiro >= 1 (recebido {epochs})")
    kind = parse_kind(kind)
    n = spec.n
    y = _signal(y, n, "y")
    x = _signal(x, n, "x")
    axis, family = _axes_for(kind, axis, family)

    h0, theta, alpha, kappa = init if init is not None else (None, 0.0, 1.0, 1.0)
    theta, alpha, kappa = float(theta), float(alpha), float(kappa)
    if h0 is None:
        h0 = wiener_h(_operator(spec, kind, axis, family, theta, alpha, kappa), y, x)
    h = _as_filter(h0, n).copy()
    active = _active_params(kind, family)

    best_loss = np.inf
    best = (h.copy(), theta, alpha, kappa)
    trace: list[TraceEntry] = []
    for _ in range(int(epochs)):
        op = _operator(spec, kind, axis, family, theta, alpha, kappa)
        current = reconstruction_loss(op, h, y, x)
        if current < best_loss:
            best_loss = current
            best = (h.copy(), theta, alpha, kappa)
        trace.append(TraceEntry(current, best_loss, theta, alpha, kappa))

        yh = apply(op, y)
        grad_h = 2.0 * (np.conj(yh) * (h * yh - apply(op, x))).real
        grads = {
            p: param_gradient(spec, kind, axis, family, h, theta, alpha, kappa, y, x, p, fd_step)
            for p in active
        }
        h = h - lr * grad_h
        theta -= lr * grads.get("theta", 0.0)
        alpha -= lr * grads.get("alpha", 0.0)
        kappa -= lr * grads.get("kappa", 0.0)
        if not np.all(np.isfinite(h)) or not np.isfinite([theta, alpha, kappa]).all():
            log.warning("gradiente divergiu; interrompendo após %d épocas", len(trace))
            break

    h_best, theta, alpha, kappa = best
    op = _operator(spec, kind, axis, family, theta, alpha, kappa)
    est, imag = filter_signal_with_residual(op, h_best, y)
    return OptResult(theta=theta, alpha=alpha, kappa=kappa, h=FilterH(h_best), mse=best_loss / n,
                     kind=kind, axis=axis, family=family, estimate=est, imag_residual=imag,
                     trace=tuple(trace))
