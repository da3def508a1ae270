# -*- coding: utf-8 -*-
"""config.py

Constantes numéricas e defaults de experimento.

Cada valor pode ser sobrescrito por variável de ambiente com prefixo GSPEC_
(ex.: GSPEC_UNITARY_TOL=1e-7) e, nas funções que usam tolerância, por argumento
nomeado na chamada. Os defaults de experimento seguem os ajustes publicados:
grade de alpha com passo 0.1, grade de theta com passo 0.628, kappa=1 na grade,
lr 0.01 e 1000 épocas no gradiente.

Arquivo de configuração (--config): texto simples `chave=valor`, uma por linha,
`#` inicia comentário, linhas em branco ignoradas. Vírgula decimal é aceita.
"""
from __future__ import annotations

import logging
import math
import os
from pathlib import Path

import numpy as np

from errors import ParseError

ENV_PREFIX = "GSPEC_"

log = logging.getLogger(__name__)


def as_float(x, default=0.0) -> float:
    """
    Converte string com vírgula/ponto para float.
    """
    if x is None:
        return float(default)
    if isinstance(x, (int, float)):
        return float(x)
    try:
        return float(str(x).replace(",", ".").strip())
    except Exception:
        return float(default)


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return float(default)
    try:
        return float(raw.replace(",", ".").strip())
    except ValueError:
        log.warning("%s%s=%r não é número; usando default %s", ENV_PREFIX, name, raw, default)
        return float(default)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        log.warning("%s%s=%r não é inteiro; usando default %s", ENV_PREFIX, name, raw, default)
        return default


# ===== Tolerâncias (matcore / spectral) =====
SYM_TOL = _env_float("SYM_TOL", 1e-12)          # simetria relativa da entrada de sym_eig
SKEW_TOL = _env_float("SKEW_TOL", 1e-12)        # ‖J + Jᵀ‖_F em expm_skew
UNITARY_TOL = _env_float("UNITARY_TOL", 1e-8)   # ‖QᴴQ − I‖_F aceito em unitary_eig
BRANCH_TOL = _env_float("BRANCH_TOL", 1e-12)    # fase a essa distância de −π vai para +π
SIGN_TIE_TOL = _env_float("SIGN_TIE_TOL", 1e-12)  # empate de módulo na convenção de sinal

# ===== Filtragem =====
WIENER_EPS = _env_float("WIENER_EPS", 1e-14)    # |ŷ_k|² abaixo disso => h_k = 0
FD_STEP = _env_float("FD_STEP", 1e-5)           # passo das diferenças centrais
IMAG_RESIDUAL_RATIO = _env_float("IMAG_RESIDUAL_RATIO", 1e-6)

# ===== Defaults de experimento =====
ALPHA_STEP = _env_float("ALPHA_STEP", 0.1)
THETA_STEP = _env_float("THETA_STEP", 0.628)
LEARNING_RATE = _env_float("LEARNING_RATE", 0.01)
EPOCHS = _env_int("EPOCHS", 1000)
KNN_K = _env_int("KNN_K", 5)
SEED = _env_int("SEED", 0)
THREADS = _env_int("THREADS", 1)
MAX_PATCH = _env_int("MAX_PATCH", 100)
PATCH_K = _env_int("PATCH_K", 10)
CHECKPOINTS = (100, 200, 300)

# σ por pipeline: séries e nuvens em unidade do sinal, imagem na escala de 8 bits
DEFAULT_SIGMAS = {
    "timeseries": (0.5, 1.0, 1.5),
    "image": (20.0, 30.0, 40.0),
    "pointcloud": (20.0, 30.0, 40.0),
}


def alpha_grid(step: float = ALPHA_STEP, start: float = 0.0, stop: float = 1.0) -> list[float]:
    """Grade inclusiva [start, stop] com passo `step` (default 0.0, 0.1, ..., 1.0)."""
    return _inclusive_grid(start, stop, step)


def theta_grid(step: float = THETA_STEP, start: float = 0.0, stop: float = 2 * math.pi) -> list[float]:
    """Ângulos igualmente espaçados em [start, stop] com passo ≈ `step`.

    O passo nominal 0.628 vira 2π/10: 11 pontos 0, 0.6283, ..., 6.2832.
    """
    if step <= 0:
        raise ValueError(f"passo da grade deve ser positivo (recebido {step})")
    count = max(1, int(round((stop - start) / step))) + 1
    return [float(t) for t in np.linspace(start, stop, count)]


def _inclusive_grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError(f"passo da grade deve ser positivo (recebido {step})")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # i*step, sem acumular
    return [round(start + i * step, 12) for i in range(count)]


def load_config_file(path) -> dict[str, str]:
    """Lê `chave=valor` para um dict de strings (interpretação fica com quem consome)."""
    p = Path(path)
    if not p.exists():
        raise ParseError(p, None, "arquivo de configuração não encontrado")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(p, lineno, f"esperado chave=valor, encontrado {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise ParseError(p, lineno, "chave vazia")
        out[key] = value.strip()
    return out
