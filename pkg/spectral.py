# -*- coding: utf-8 -*-
"""spectral.py

Operadores espectrais sobre um grafo (todos N×N complexos, densos):

    gft        F = Uᴴ
    gfrft      Fᵅ                         inversa F^{−α}
    agft       F_θ = (R·U)ᴴ = F·Rᵀ        inversa R·U
    agfrft_i   (F_θ)ᵅ                     inversa (F_θ)^{−α}
    agfrft_ii  Fᵅ·Rᵀ = (R·F^{−α})ᴴ        inversa R·F^{−α}

Atenção no tipo II: trocar α por −α na definição (F^{−α}·Rᵀ) não é a inversa,
salvo se R comutar com F^{−α}.

Potências fracionárias usam o ramo principal (matcore.frac_power_unitary), e a
decomposição de F fica memorizada no GraphSpectrum para que Fᵅ e F^{−α} saiam da
mesma base.
"""
from __future__ import annotations

import hashlib
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from errors import DimensionError, ParameterError
from matcore import SymEig, UnitaryEig, sym_eig, unitary_eig
from rotations import AxisKind, Family, RotationSpec, rotation_matrix


class TransformKind(str, Enum):
    GFT = "gft"
    GFRFT = "gfrft"
    AGFT = "agft"
    AGFRFT_I = "agfrft_i"
    AGFRFT_II = "agfrft_ii"

    @property
    def uses_rotation(self) -> bool:
        return self in (TransformKind.AGFT, TransformKind.AGFRFT_I, TransformKind.AGFRFT_II)

    @property
    def uses_alpha(self) -> bool:
        return self in (TransformKind.GFRFT, TransformKind.AGFRFT_I, TransformKind.AGFRFT_II)


def parse_kind(value) -> TransformKind:
    if isinstance(value, TransformKind):
        return value
    key = str(value).strip().lower().replace("-", "_")
    try:
        return TransformKind(key)
    except ValueError:
        raise ParameterError(
            f"tipo de transformada inválido: {value!r} (gft, gfrft, agft, agfrft-i, agfrft-ii)"
        ) from None


@dataclass(frozen=True)
class GraphSpectrum:
    gso: np.ndarray
    eig: SymEig
    gft: np.ndarray  # F = Uᵀ (U real)

    @property
    def n(self) -> int:
        return self.gso.shape[0]

    @cached_property
    def gft_eig(self) -> UnitaryEig:
        return unitary_eig(self.gft)

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha1(np.ascontiguousarray(self.gso).tobytes()).hexdigest()


@dataclass(frozen=True)
class TransformParams:
    theta: float = 0.0
    alpha: float = 1.0
    kappa: float = 1.0
    axis: AxisKind | None = None
    family: Family | None = None


@dataclass(frozen=True)
class TransformOperator:
    kind: TransformKind
    forward: np.ndarray
    inverse: np.ndarray
    params: TransformParams = field(default_factory=TransformParams)

    @property
    def n(self) -> int:
        return self.forward.shape[0]


def build_spectrum(gso) -> GraphSpectrum:
    eig = sym_eig(gso)
    m = np.array(gso, dtype=float)
    f = eig.eigenvectors.T.copy()
    m.setflags(write=False)
    f.setflags(write=False)
    return GraphSpectrum(gso=m, eig=eig, gft=f)


def _rotation(spec: GraphSpectrum, rot: RotationSpec) -> np.ndarray | None:
    """R para a dimensão do espectro; None quando R é exatamente a identidade."""
    r = rotation_matrix(rot, spec.n)
    if r.shape != (spec.n, spec.n):
        raise DimensionError(f"rotação {r.shape} incompatível com N={spec.n}")
    if np.array_equal(r, np.eye(spec.n)):
        return None
    return r


def _params(rot: RotationSpec | None, alpha: float) -> TransformParams:
    if rot is None:
        return TransformParams(alpha=float(alpha))
    return TransformParams(theta=rot.theta, alpha=float(alpha), kappa=rot.kappa, axis=rot.axis, family=rot.family)


def gft_operator(spec: GraphSpectrum) -> TransformOperator:
    f = spec.gft.astype(complex)
    return TransformOperator(TransformKind.GFT, f, f.conj().T.copy(), _params(None, 1.0))


def gfrft_operator(spec: GraphSpectrum, alpha: float) -> TransformOperator:
    eig = spec.gft_eig
    return TransformOperator(TransformKind.GFRFT, eig.power(alpha), eig.power(-alpha), _params(None, alpha))


def agft_operator(spec: GraphSpectrum, rot: RotationSpec) -> TransformOperator:
    r = _rotation(spec, rot)
    u = spec.eig.eigenvectors
    if r is None:
        fwd, inv = spec.gft, u
    else:
        fwd, inv = spec.gft @ r.T, r @ u
    return TransformOperator(TransformKind.AGFT, fwd.astype(complex), inv.astype(complex), _params(rot, 1.0))


def agfrft_i_operator(spec: GraphSpectrum, rot: RotationSpec, alpha: float) -> TransformOperator:
    r = _rotation(spec, rot)
    eig = spec.gft_eig if r is None else unitary_eig(spec.gft @ r.T)
    return TransformOperator(TransformKind.AGFRFT_I, eig.power(alpha), eig.power(-alpha), _params(rot, alpha))


def agfrft_ii_operator(spec: GraphSpectrum, rot: RotationSpec, alpha: float) -> TransformOperator:
    r = _rotation(spec, rot)
    eig = spec.gft_eig
    f_pos, f_neg = eig.power(alpha), eig.power(-alpha)
    if r is None:
        fwd, inv = f_pos, f_neg
    else:
        fwd, inv = f_pos @ r.T, r @ f_neg
    return TransformOperator(TransformKind.AGFRFT_II, fwd, inv, _params(rot, alpha))


def build_operator(spec: GraphSpectrum, kind, rot: RotationSpec | None = None, alpha: float = 1.0) -> TransformOperator:
    """Ponto único de construção: despacha pelo tipo."""
    kind = parse_kind(kind)
    if kind.uses_rotation and rot is None:
        rot = RotationSpec()
    if kind is TransformKind.GFT:
        return gft_operator(spec)
    if kind is TransformKind.GFRFT:
        return gfrft_operator(spec, alpha)
    if kind is TransformKind.AGFT:
        return agft_operator(spec, rot)
    if kind is TransformKind.AGFRFT_I:
        return agfrft_i_operator(spec, rot, alpha)
    return agfrft_ii_operator(spec, rot, alpha)


def _vector(op: TransformOperator, x) -> np.ndarray:
    v = np.asarray(x)
    if v.ndim != 1 or v.shape[0] != op.n:
        raise DimensionError(f"sinal de tamanho {v.shape} incompatível com N={op.n}")
    return v


def apply(op: TransformOperator, x) -> np.ndarray:
    """x̂ = forward·x (sempre complexo)."""
    return op.forward @ _vector(op, x)


def apply_inverse(op: TransformOperator, xhat) -> np.ndarray:
    return op.inverse @ _vector(op, xhat)


def spectral_concentration(op: TransformOperator, x, k: int) -> float:
    """Fração de ‖x‖² capturada pelos k maiores coeficientes |x̂|."""
    if k < 1 or k > op.n:
        raise ParameterError(f"k deve estar em [1, {op.n}] (recebido {k})")
    energy = np.sort(np.abs(apply(op, x)) ** 2)[::-1]
    total = float(energy.sum())
    if total == 0.0:
        return 1.0
    return float(energy[:k].sum() / total)


class OperatorCache:
    """Memo LRU de operadores; chave exata (sem arredondar parâmetros).

    Chave: (fingerprint do GSO, tipo, eixo, família, θ, α, κ). Seguro para várias
    threads; duas threads podem construir o mesmo operador em paralelo, o
    resultado é o mesmo.
    """

    def __init__(self, maxsize: int = 256):
        self.maxsize = maxsize
        self._data: OrderedDict[tuple, TransformOperator] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(spec: GraphSpectrum, kind: TransformKind, rot: RotationSpec | None, alpha: float) -> tuple:
        if not kind.uses_rotation:
            rot = None
        if not kind.uses_alpha:
            alpha = 1.0
        if rot is None:
            return (spec.fingerprint, kind.value, None, None, 0.0, float(alpha), 1.0)
        return (spec.fingerprint, kind.value, rot.axis.value, rot.family.value, rot.theta, float(alpha), rot.kappa)

    def get(self, spec: GraphSpectrum, kind, rot: RotationSpec | None = None, alpha: float = 1.0) -> TransformOperator:
        kind = parse_kind(kind)
        k = self.key(spec, kind, rot, alpha)
        with self._lock:
            op = self._data.get(k)
            if op is not None:
                self._data.move_to_end(k)
                self.hits += 1
                return op
            self.misses += 1
        op = build_operator(spec, kind, rot, alpha)
        with self._lock:
            self._data[k] = op
            self._data.move_to_end(k)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        return op
