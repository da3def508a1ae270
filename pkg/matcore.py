# -*- coding: utf-8 -*-
"""matcore.py

Núcleos matriciais densos usados pelo resto do pacote:
  - sym_eig            : autodecomposição simétrica com convenção de sinal fixa
  - unitary_eig        : autodecomposição de matriz unitária (Schur complexo)
  - expm_skew          : exponencial de matriz antissimétrica (resultado ortogonal)
  - frac_power_unitary : potência fracionária pelo ramo principal do log

Tudo é função pura; os resultados são imutáveis (arrays marcados read-only).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

import config
from errors import DimensionError, SymmetryError, UnitarityError


@dataclass(frozen=True)
class SymEig:
    eigenvalues: np.ndarray   # crescentes
    eigenvectors: np.ndarray  # colunas ortonormais

    def __post_init__(self):
        _freeze(self.eigenvalues, self.eigenvectors)


@dataclass(frozen=True)
class UnitaryEig:
    eigenvalues: np.ndarray   # módulo 1, ordenados pela fase principal
    eigenvectors: np.ndarray  # unitária

    def __post_init__(self):
        _freeze(self.eigenvalues, self.eigenvectors)

    @property
    def phases(self) -> np.ndarray:
        """ψ_k ∈ (−π, π] com λ_k = e^{iψ_k}."""
        return principal_phases(self.eigenvalues)

    def power(self, alpha: float) -> np.ndarray:
        """V·diag(e^{iαψ})·Vᴴ reaproveitando esta decomposição (semigrupo exato em α)."""
        v = self.eigenvectors
        if alpha == 0:
            out = np.eye(v.shape[0], dtype=complex)
        else:
            out = (v * np.exp(1j * float(alpha) * self.phases)) @ v.conj().T
        out.setflags(write=False)
        return out


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.setflags(write=False)


def _square(a, name: str = "matriz", dtype=float) -> np.ndarray:
    m = np.array(a, dtype=dtype, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} deve ser quadrada (forma recebida {m.shape})")
    if not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} contém entradas não finitas")
    return m


def principal_phases(eigenvalues, branch_tol: float = config.BRANCH_TOL) -> np.ndarray:
    """Fases no intervalo (−π, π]; o empate em −1 vai sempre para +π."""
    psi = np.angle(np.asarray(eigenvalues, dtype=complex))
    return np.where(psi <= -np.pi + branch_tol, psi + 2 * np.pi, psi)


def unitarity_residual(q: np.ndarray) -> float:
    n = q.shape[0]
    return float(np.linalg.norm(q.conj().T @ q - np.eye(n), "fro"))


def sym_eig(a, tol: float = config.SYM_TOL) -> SymEig:
    """Autodecomposição de matriz real simétrica.

    Autovalores crescentes. Sinal dos autovetores fixado: a entrada de maior
    módulo de cada coluna é positiva (empate, dentro de SIGN_TIE_TOL, -> menor
    índice). Autoespaços repetidos podem vir em qualquer base
    ortonormal; compare operadores reconstruídos, não vetores.
    """
    m = _square(a, "GSO")
    scale = max(1.0, float(np.linalg.norm(m, "fro")))
    asym = float(np.linalg.norm(m - m.T, "fro"))
    if asym > tol * scale:
        raise SymmetryError(f"matriz não simétrica: ‖A − Aᵀ‖_F = {asym:.3e}")
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    mag = np.abs(v)
    # empate até o último bit conta como empate -> menor índice
    pivots = np.argmax(mag >= mag.max(axis=0) - config.SIGN_TIE_TOL, axis=0)
    signs = np.where(v[pivots, np.arange(v.shape[1])] < 0, -1.0, 1.0)
    return SymEig(eigenvalues=w, eigenvectors=v * signs)


def unitary_eig(q, tol: float = config.UNITARY_TOL) -> UnitaryEig:
    """Autodecomposição de matriz unitária (ou real ortogonal).

    Usa a forma de Schur complexa: para matriz normal o fator triangular é
    diagonal a menos de arredondamento, e o fator Z já sai unitário mesmo com
    autovalores repetidos. Ordem: fase principal crescente, empate pela parte
    imaginária.
    """
    m = _square(q, "matriz unitária", dtype=complex)
    res = unitarity_residual(m)
    if res > tol:
        raise UnitarityError(res, tol)
    t, z = scipy.linalg.schur(m, output="complex")
    lam = np.diag(t).copy()
    lam /= np.abs(lam)
    psi = principal_phases(lam)
    order = np.lexsort((lam.imag, psi))
    return UnitaryEig(eigenvalues=lam[order], eigenvectors=z[:, order])


def expm_skew(j, phi: float, tol: float = config.SKEW_TOL) -> np.ndarray:
    """exp(φJ) para J antissimétrica; φ = 0 devolve a identidade exata."""
    m = _square(j, "J")
    skew = float(np.linalg.norm(m + m.T, "fro"))
    if skew > tol:
        raise SymmetryError(f"J não é antissimétrica: ‖J + Jᵀ‖_F = {skew:.3e}")
    if phi == 0:
        return np.eye(m.shape[0])
    return scipy.linalg.expm(float(phi) * m)


def frac_power_unitary(q, alpha: float, tol: float = config.UNITARY_TOL) -> np.ndarray:
    """Qᵅ = exp(α log Q) com o ramo principal do log."""
    return unitary_eig(q, tol=tol).power(alpha)
