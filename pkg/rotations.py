# -*- coding: utf-8 -*-
"""rotations.py

Duas famílias de rotações N×N parametrizadas por um ângulo theta:

1. legacy:   recursão roll/pitch/yaw com combinação fixa 1/√2 [[R, R], [−R∩, R∩]].
              É ortogonal, mas em theta = 0 NÃO volta à identidade para N >= 4
              (e o determinante pode ser −1, por causa do flip R∩).
2. degeneracy_friendly: recursão com blocos diagonais, rotações de Givens em
              bloco (S_M / T_M) e a perturbação exp(φJ_axis). Fica em SO(N) e vale
              exatamente I_N em theta = 0. φ(θ) = κθ.

Índices nos comentários são 1-based (como nas fórmulas); no código, 0-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from errors import DimensionError, ParameterError
from matcore import expm_skew


class AxisKind(str, Enum):
    ROLL = "roll"
    PITCH = "pitch"
    YAW = "yaw"


class Family(str, Enum):
    DEGENERACY_FRIENDLY = "degeneracy_friendly"
    LEGACY = "legacy"


_FAMILY_ALIAS = {"df": Family.DEGENERACY_FRIENDLY, "degeneracy-friendly": Family.DEGENERACY_FRIENDLY}


def parse_axis(value) -> AxisKind:
    if isinstance(value, AxisKind):
        return value
    try:
        return AxisKind(str(value).strip().lower())
    except ValueError:
        raise ParameterError(f"eixo inválido: {value!r} (use roll, pitch ou yaw)") from None


def parse_family(value) -> Family:
    if isinstance(value, Family):
        return value
    key = str(value).strip().lower()
    if key in _FAMILY_ALIAS:
        return _FAMILY_ALIAS[key]
    try:
        return Family(key)
    except ValueError:
        raise ParameterError(f"família inválida: {value!r} (use df ou legacy)") from None


@dataclass(frozen=True)
class RotationSpec:
    axis: AxisKind = AxisKind.YAW
    family: Family = Family.DEGENERACY_FRIENDLY
    theta: float = 0.0
    kappa: float = 1.0  # só a família degeneracy_friendly usa

    def __post_init__(self):
        object.__setattr__(self, "axis", parse_axis(self.axis))
        object.__setattr__(self, "family", parse_family(self.family))
        if not (math.isfinite(self.theta) and math.isfinite(self.kappa)):
            raise ParameterError("theta e kappa devem ser finitos")

    @property
    def phi(self) -> float:
        return self.kappa * self.theta


# ==========================
# Primitivas
# ==========================
def _check_square(r) -> np.ndarray:
    m = np.asarray(r, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"matriz deve ser quadrada (forma recebida {m.shape})")
    return m


def _check_n(n, minimum: int = 1) -> int:
    if int(n) != n or n < minimum:
        raise DimensionError(f"dimensão deve ser inteiro >= {minimum} (recebido {n})")
    return int(n)


def flip_updown(r) -> np.ndarray:
    """R∩: linha i da saída = linha M+1−i da entrada."""
    return _check_square(r)[::-1, :].copy()


def diamond(x) -> np.ndarray:
    """X⋄ = P X P (P = permutação antidiagonal): entrada (i,j) <- (M+1−i, M+1−j)."""
    return _check_square(x)[::-1, ::-1].copy()


def givens2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def _base3(axis: AxisKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    if axis is AxisKind.ROLL:
        return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])
    if axis is AxisKind.PITCH:
        return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def j_matrix(axis, n: int) -> np.ndarray:
    """Geradores antissimétricos por eixo.

    roll : acopla todos os pares adjacentes (i, i+1)
    yaw  : só pares cujo primeiro índice (1-based) é ímpar -> (1,2), (3,4), ...
    pitch: só pares cujo primeiro índice (1-based) é par   -> (2,3), (4,5), ...
    Convenção: J[i, i+1] = −1, J[i+1, i] = +1.
    """
    axis = parse_axis(axis)
    n = _check_n(n, 2)
    j = np.zeros((n, n))
    for i in range(n - 1):
        if axis is AxisKind.YAW and i % 2 != 0:
            continue
        if axis is AxisKind.PITCH and i % 2 != 1:
            continue
        j[i, i + 1] = -1.0
        j[i + 1, i] = 1.0
    return j


def block_rotation_even(m: int, phi: float) -> np.ndarray:
    """S_M(φ) = [[cos φ·I, sin φ·I], [−sin φ·I, cos φ·I]] ∈ SO(2M)."""
    m = _check_n(m)
    c, s = math.cos(phi), math.sin(phi)
    eye = np.eye(m)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


# Cada par gira os dois blocos de tamanho M; a posição fora do par é o escalar 1.
#   (1,2): layout (M, M, 1)   (1,3): layout (M, 1, M)   (2,3): layout (1, M, M)
_ODD_PAIRS = {(1, 2), (1, 3), (2, 3)}


def _odd_slices(pair: tuple[int, int], m: int) -> tuple[np.ndarray, np.ndarray]:
    if pair == (1, 2):
        return np.arange(0, m), np.arange(m, 2 * m)
    if pair == (1, 3):
        return np.arange(0, m), np.arange(m + 1, 2 * m + 1)
    return np.arange(1, m + 1), np.arange(m + 1, 2 * m + 1)


def block_rotation_odd(pair, m: int, phi: float) -> np.ndarray:
    """T_M^{pair}(φ) de tamanho (2M+1); T(0) = I."""
    pair = tuple(pair)
    if pair not in _ODD_PAIRS:
        raise ParameterError(f"par de blocos inválido: {pair} (use (1,2), (1,3) ou (2,3))")
    m = _check_n(m)
    c, s = math.cos(phi), math.sin(phi)
    first, second = _odd_slices(pair, m)
    t = np.eye(2 * m + 1)
    t[np.ix_(first, first)] = c * np.eye(m)
    t[np.ix_(first, second)] = s * np.eye(m)
    t[np.ix_(second, first)] = -s * np.eye(m)
    t[np.ix_(second, second)] = c * np.eye(m)
    return t


# ==========================
# Família legacy
# ==========================
def legacy_rotation(axis, n: int, theta: float) -> np.ndarray:
    axis = parse_axis(axis)
    n = _check_n(n)
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        return givens2(theta)
    if n == 3:
        return _base3(axis, theta)
    m = n // 2
    sub = legacy_rotation(axis, m, theta)
    up = flip_updown(sub)
    if n % 2 == 0:
        # N par: os três eixos coincidem
        return np.block([[sub, sub], [-up, up]]) / math.sqrt(2.0)
    z_col = np.zeros((m, 1))
    z_row = np.zeros((1, m))
    r2 = np.array([[math.sqrt(2.0)]])
    if axis is AxisKind.ROLL:
        out = np.block([[r2, z_row, z_row], [z_col, sub, sub], [z_col, -up, up]])
    elif axis is AxisKind.PITCH:
        out = np.block([[sub, z_col, -up], [z_row, r2, z_row], [sub, z_col, up]])
    else:
        out = np.block([[sub, sub, z_col], [-up, up, z_col], [z_row, z_row, r2]])
    return out / math.sqrt(2.0)


# ==========================
# Família degeneracy_friendly
# ==========================
def df_rotation(spec: RotationSpec, n: int) -> np.ndarray:
    if spec.family is not Family.DEGENERACY_FRIENDLY:
        raise ParameterError("df_rotation exige family=degeneracy_friendly")
    return _df(spec.axis, _check_n(n), spec.theta, spec.phi)


def _df(axis: AxisKind, n: int, theta: float, phi: float) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        return givens2(theta)
    if n == 3:
        return _base3(axis, theta)
    m = n // 2
    sub = _df(axis, m, theta, phi)
    if n % 2 == 0:
        block = scipy.linalg.block_diag(sub, diamond(sub))
        return block @ block_rotation_even(m, phi) @ expm_skew(j_matrix(axis, n), phi)
    one = np.ones((1, 1))
    if axis is AxisKind.YAW:
        block, pair = scipy.linalg.block_diag(sub, diamond(sub), one), (1, 2)
    elif axis is AxisKind.PITCH:
        block, pair = scipy.linalg.block_diag(sub, one, diamond(sub)), (1, 3)
    else:
        block, pair = scipy.linalg.block_diag(one, sub, diamond(sub)), (2, 3)
    return block @ block_rotation_odd(pair, m, phi)


def rotation_matrix(spec: RotationSpec, n: int) -> np.ndarray:
    """Despacha pela família; é o que spectral usa."""
    if spec.family is Family.LEGACY:
        return legacy_rotation(spec.axis, n, spec.theta)
    return df_rotation(spec, n)
