# -*- coding: utf-8 -*-
"""harness.py

TOC:
    1. Tipos (MethodSpec, ExperimentConfig, ResultRow, GrayImage)
    2. Ruído, sementes e métricas (mse / psnr / ssim)
    3. Leitura e escrita de arquivos (CSV, PGM, PLY, resultados)
    4. Blocos de imagem
    5. Fixtures sintéticas
    6. Pipelines (timeseries / image / pointcloud)
    7. Resumo por eixo

Convenções:
  - Imagens decodificadas pelo Pillow na escala 0..255 e normalizadas para [0,1]; PSNR com pico 1.
  - σ da imagem vem na escala de 8 bits e é dividido por 255 (maxval da GrayImage).
  - Nuvem de pontos: métricas sobre coordenadas divididas pela diagonal da
    caixa envolvente do sinal limpo (pico 1). O grafo sai das coordenadas ruidosas.
  - Gerador de ruído: numpy.random.default_rng (PCG64) com semente derivada de
    (seed, segmento, índice de σ) via SeedSequence. O mesmo y vale para todos os
    métodos de uma célula (comparação justa entre transformadas).
"""
from __future__ import annotations

import csv
import io
import logging
import math
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np
from PIL import Image, UnidentifiedImageError
from plyfile import PlyData, PlyElementParseError, PlyHeaderParseError
from skimage.metrics import structural_similarity

import config
from errors import DimensionError, ParameterError, ParseError
from filtering import FilterH, OptResult, gradient_descent, grid_search
from graphs import (
    Graph,
    GsoKind,
    graph_from_edges,
    gso,
    image_block_graph,
    parse_gso_kind,
    pointcloud_patches,
    sequence_graph,
)
from rotations import AxisKind, Family, parse_axis, parse_family
from spectral import GraphSpectrum, OperatorCache, TransformKind, build_spectrum, parse_kind

log = logging.getLogger(__name__)

PIPELINES = ("timeseries", "image", "pointcloud")
OPTIMIZERS = ("grid", "gd")
RESULT_HEADER = ("method", "axis", "family", "sigma", "segment", "alpha", "theta", "kappa", "mse", "psnr", "ssim")
DEFAULT_METHODS = "gfrft,agft,agfrft-i,agfrft-ii"
SSIM_MIN_SIDE = 11

EventHook = Callable[[str, dict], None]


# ==========================
# 1. Tipos
# ==========================
@dataclass(frozen=True)
class MethodSpec:
    kind: TransformKind
    axis: AxisKind | None = None
    family: Family | None = None

    @property
    def label(self) -> str:
        return self.kind.value.replace("_", "-")


def parse_methods(value, family=Family.DEGENERACY_FRIENDLY) -> tuple[MethodSpec, ...]:
    """'gfrft,agfrft-ii:yaw,agft:roll:legacy' -> MethodSpecs.

    Tipo com rotação e sem eixo expande para roll, pitch e yaw.
    """
    tokens = _split_list(value) if isinstance(value, str) else list(value)
    out: list[MethodSpec] = []
    for tok in tokens:
        if isinstance(tok, MethodSpec):
            out.append(tok)
            continue
        parts = [p.strip() for p in str(tok).split(":")]
        kind = parse_kind(parts[0])
        if not kind.uses_rotation:
            out.append(MethodSpec(kind))
            continue
        fam = parse_family(parts[2]) if len(parts) > 2 and parts[2] else parse_family(family)
        axes = [parse_axis(parts[1])] if len(parts) > 1 and parts[1] else list(AxisKind)
        out.extend(MethodSpec(kind, ax, fam) for ax in axes)
    return tuple(dict.fromkeys(out))


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in re.split(r"[,;\s]+", text.strip()) if t.strip()]


def _float_list(value) -> tuple[float, ...]:
    items = _split_list(value) if isinstance(value, str) else list(value)
    out = []
    for it in items:
        try:
            out.append(float(it))
        except (TypeError, ValueError):
            raise ParameterError(f"valor numérico inválido na lista: {it!r}") from None
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    pipeline: str = "timeseries"
    methods: tuple[MethodSpec, ...] = field(default_factory=lambda: parse_methods(DEFAULT_METHODS))
    noise_sigmas: tuple[float, ...] = config.DEFAULT_SIGMAS["timeseries"]
    knn_k: int = config.KNN_K
    gso_kind: GsoKind = GsoKind.LAPLACIAN
    optimizer: str = "grid"
    theta_grid: tuple[float, ...] = field(default_factory=lambda: tuple(config.theta_grid()))
    alpha_grid: tuple[float, ...] = field(default_factory=lambda: tuple(config.alpha_grid()))
    kappa: float = 1.0
    lr: float = config.LEARNING_RATE
    epochs: int = config.EPOCHS
    seed: int = config.SEED
    threads: int = config.THREADS
    checkpoints: tuple[int, ...] = config.CHECKPOINTS
    max_patch: int = config.MAX_PATCH
    patch_k: int = config.PATCH_K
    input: str | None = None

    def __post_init__(self):
        if self.pipeline not in PIPELINES:
            raise ParameterError(f"pipeline inválido: {self.pipeline!r} ({', '.join(PIPELINES)})")
        if self.optimizer not in OPTIMIZERS:
            raise ParameterError(f"otimizador inválido: {self.optimizer!r} (grid ou gd)")
        if not self.methods:
            raise ParameterError("lista de métodos vazia")
        if not self.noise_sigmas:
            raise ParameterError("lista de sigmas vazia")
        if any(s < 0 or not math.isfinite(s) for s in self.noise_sigmas):
            raise ParameterError("sigma deve ser finito e >= 0")
        if not self.theta_grid or not self.alpha_grid:
            raise ParameterError("grades de theta e alpha não podem ser vazias")
        if self.knn_k < 1 or self.threads < 1 or self.max_patch < 1 or self.patch_k < 1:
            raise ParameterError("k, threads, max_patch e patch_k devem ser >= 1")
        if self.optimizer == "gd" and (self.lr <= 0 or self.epochs < 1):
            raise ParameterError("gd exige lr > 0 e epochs >= 1")
        if not self.checkpoints:
            raise ParameterError("lista de checkpoints vazia")
        object.__setattr__(self, "gso_kind", parse_gso_kind(self.gso_kind))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "ExperimentConfig":
        """Monta a partir de um dict (arquivo chave=valor ou flags). None = não informado."""
        data = canonical_keys(mapping)
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise ParameterError(f"chaves de configuração desconhecidas: {', '.join(unknown)}")

        pipeline = str(data.get("pipeline", "timeseries")).strip().lower()
        kw: dict[str, object] = {"pipeline": pipeline}
        family = data.get("family", Family.DEGENERACY_FRIENDLY)
        kw["methods"] = parse_methods(data.get("methods", DEFAULT_METHODS), family)
        kw["noise_sigmas"] = (_float_list(data["sigmas"]) if "sigmas" in data
                              else config.DEFAULT_SIGMAS.get(pipeline, (1.0,)))
        for name in ("knn_k", "epochs", "seed", "threads", "max_patch", "patch_k"):
            if name in data:
                kw[name] = _int(data[name], name)
        for name in ("kappa", "lr"):
            if name in data:
                kw[name] = config.as_float(data[name], math.nan)
                if not math.isfinite(kw[name]):
                    raise ParameterError(f"{name} inválido: {data[name]!r}")
        if "gso_kind" in data:
            kw["gso_kind"] = parse_gso_kind(data["gso_kind"])
        if "optimizer" in data:
            kw["optimizer"] = str(data["optimizer"]).strip().lower()
        if "checkpoints" in data:
            kw["checkpoints"] = tuple(_int(v, "checkpoints") for v in _float_list(data["checkpoints"]))
        if "input" in data:
            kw["input"] = str(data["input"])
        if "theta_grid" in data:
            kw["theta_grid"] = _float_list(data["theta_grid"])
        elif "theta_step" in data:
            kw["theta_grid"] = tuple(config.theta_grid(config.as_float(data["theta_step"], config.THETA_STEP)))
        if "alpha_grid" in data:
            kw["alpha_grid"] = _float_list(data["alpha_grid"])
        elif "alpha_step" in data:
            kw["alpha_grid"] = tuple(config.alpha_grid(config.as_float(data["alpha_step"], config.ALPHA_STEP)))
        return cls(**kw)


CONFIG_ALIASES = {"sigma": "sigmas", "noise_sigmas": "sigmas", "k": "knn_k", "gso": "gso_kind",
                  "t": "checkpoints", "in": "input"}
CONFIG_KEYS = {"pipeline", "methods", "sigmas", "knn_k", "gso_kind", "optimizer", "theta_step",
               "alpha_step", "theta_grid", "alpha_grid", "kappa", "lr", "epochs", "seed",
               "threads", "checkpoints", "max_patch", "patch_k", "input", "family", "out"}


def canonical_keys(mapping: Mapping[str, object]) -> dict[str, object]:
    """Aplica os apelidos (sigma -> sigmas, k -> knn_k, ...) e descarta valores None."""
    return {CONFIG_ALIASES.get(k, k): v for k, v in mapping.items() if v is not None}


def _int(value, name: str) -> int:
    try:
        f = float(str(value).replace(",", ".")) if not isinstance(value, (int, float)) else float(value)
    except ValueError:
        raise ParameterError(f"{name} deve ser inteiro (recebido {value!r})") from None
    if not f.is_integer():
        raise ParameterError(f"{name} deve ser inteiro (recebido {value!r})")
    return int(f)


@dataclass(frozen=True)
class ResultRow:
    method: str
    axis: str
    family: str
    sigma: float
    segment: str
    alpha: float
    theta: float
    kappa: float
    mse: float
    psnr: float
    ssim: float | None = None

    def sort_key(self):
        seg = (0, int(self.segment), "") if self.segment.isdigit() else (1, 0, self.segment)
        return (seg, self.sigma, self.method, self.family, self.axis)


@dataclass(frozen=True)
class GrayImage:
    pixels: np.ndarray  # float em [0,1]
    maxval: int = 255

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape


# ==========================
# 2. Ruído e métricas
# ==========================
def derive_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([int(seed), *[int(k) for k in keys]]).generate_state(1)[0])


def add_gaussian_noise(x, sigma: float, seed: int) -> np.ndarray:
    """x + σ·g, g ~ N(0,1) de default_rng(seed) (PCG64). σ = 0 devolve cópia exata de x."""
    if sigma < 0 or not math.isfinite(sigma):
        raise ParameterError(f"sigma deve ser finito e >= 0 (recebido {sigma})")
    v = np.asarray(x, dtype=float)
    if sigma == 0:
        return v.copy()
    rng = np.random.default_rng(seed)
    return v + sigma * rng.standard_normal(v.shape)


def mse(a, b) -> float:
    """‖a − b‖₂² / N (mesma conta do grid_search)."""
    va = np.asarray(a, dtype=float).ravel()
    vb = np.asarray(b, dtype=float).ravel()
    if va.shape != vb.shape:
        raise DimensionError(f"tamanhos diferentes: {va.shape} vs {vb.shape}")
    d = va - vb
    return float(d @ d) / d.size


def psnr(mse_value: float, peak: float = 1.0) -> float:
    if mse_value < 0:
        raise ParameterError(f"mse negativo: {mse_value}")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(peak ** 2 / mse_value)


def ssim(a, b) -> float:
    """SSIM com janela gaussiana 11×11 (σ=1.5), C1=(0.01)², C2=(0.03)², faixa dinâmica 1."""
    ia = np.asarray(a, dtype=float)
    ib = np.asarray(b, dtype=float)
    if ia.ndim != 2 or ia.shape != ib.shape:
        raise DimensionError(f"imagens com dimensões diferentes: {ia.shape} vs {ib.shape}")
    if min(ia.shape) < SSIM_MIN_SIDE:
        raise DimensionError(f"SSIM exige imagem com lados >= {SSIM_MIN_SIDE} (forma {ia.shape})")
    return float(structural_similarity(ia, ib, data_range=1.0, gaussian_weights=True, sigma=1.5,
                                       use_sample_covariance=False, K1=0.01, K2=0.03))


# ==========================
# 3. Arquivos
# ==========================
def _read_text(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise ParseError(p, None, "arquivo não encontrado")
    return p.read_text(encoding="utf-8")


def _parse_float(token: str, path, lineno: int) -> float:
    try:
        v = float(token.strip())
    except ValueError:
        raise ParseError(path, lineno, f"número inválido: {token.strip()!r}") from None
    if not math.isfinite(v):
        raise ParseError(path, lineno, f"valor não finito: {token.strip()!r}")
    return v


def _data_rows(path, header: tuple[str, ...]):
    """Linhas não vazias do CSV como (lineno, campos); cabeçalho opcional na primeira."""
    rows = csv.reader(io.StringIO(_read_text(path)))
    first = True
    for lineno, fields in enumerate(rows, start=1):
        fields = [f.strip() for f in fields]
        if not any(fields):
            continue
        if first:
            first = False
            if tuple(f.lower() for f in fields) == header[: len(fields)] and not _is_number(fields[0]):
                continue
        yield lineno, fields


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_signal_csv(path) -> np.ndarray:
    """Um real por linha, cabeçalho opcional `value`."""
    out = []
    for lineno, fields in _data_rows(path, ("value",)):
        if len(fields) != 1:
            raise ParseError(path, lineno, f"esperado 1 valor por linha, encontrado {len(fields)}")
        out.append(_parse_float(fields[0], path, lineno))
    if not out:
        raise ParseError(path, None, "sinal vazio")
    return np.array(out)


def load_complex_csv(path) -> np.ndarray:
    """Linhas `re,im` (cabeçalho opcional); coluna única = parte real."""
    out = []
    for lineno, fields in _data_rows(path, ("re", "im")):
        if len(fields) not in (1, 2):
            raise ParseError(path, lineno, f"esperado re[,im], encontrado {len(fields)} campos")
        re_ = _parse_float(fields[0], path, lineno)
        im_ = _parse_float(fields[1], path, lineno) if len(fields) == 2 else 0.0
        out.append(complex(re_, im_))
    if not out:
        raise ParseError(path, None, "espectro vazio")
    return np.array(out, dtype=complex)


def load_edges_csv(path, n: int | None = None) -> Graph:
    """`i,j,w` 0-based, cada aresta uma vez; w omitido vale 1."""
    edges = []
    for lineno, fields in _data_rows(path, ("i", "j", "w")):
        if len(fields) not in (2, 3):
            raise ParseError(path, lineno, f"esperado i,j,w, encontrado {len(fields)} campos")
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(path, lineno, f"índices inválidos: {fields[0]!r},{fields[1]!r}") from None
        w = _parse_float(fields[2], path, lineno) if len(fields) == 3 else 1.0
        if i < 0 or j < 0:
            raise ParseError(path, lineno, "índices devem ser >= 0")
        if i == j:
            raise ParseError(path, lineno, f"laço em {i} não permitido")
        if w < 0:
            raise ParseError(path, lineno, "peso negativo")
        if n is not None and max(i, j) >= n:
            raise ParseError(path, lineno, f"índice fora de [0, {n})")
        edges.append((i, j, w))
    if n is None:
        if not edges:
            raise ParseError(path, None, "lista de arestas vazia e n não informado")
        n = max(max(i, j) for i, j, _ in edges) + 1
    return graph_from_edges(n, edges)


def load_pgm(path) -> GrayImage:
    """PGM P2/P5 via Pillow, normalizado para [0,1].

    Pillow devolve os tons já na escala 0..255 (maxval < 255 é reescalado),
    então a normalização é sempre por 255. maxval > 255 vira modo "I" e é recusado.
    """
    p = Path(path)
    if not p.is_file():
        raise ParseError(p, None, "arquivo não encontrado")
    try:
        with Image.open(p) as im:
            im.load()
            fmt, mode = im.format, im.mode
            pixels = np.asarray(im, dtype=float)
    except UnidentifiedImageError:
        raise ParseError(p, 1, "formato não reconhecido (use PGM P2 ou P5)") from None
    except (OSError, ValueError, SyntaxError) as e:
        raise ParseError(p, None, f"PGM inválido: {e}") from None
    if fmt != "PPM":
        raise ParseError(p, 1, f"formato não suportado: {fmt} (use PGM P2 ou P5)")
    if mode == "I":
        raise ParseError(p, 1, "maxval deve ser <= 255")
    if mode != "L":
        raise ParseError(p, 1, f"imagem {mode} não é PGM em tons de cinza (use P2 ou P5)")
    if pixels.ndim != 2 or min(pixels.shape) < 1:
        raise ParseError(p, None, f"dimensões inválidas: {pixels.shape}")
    return GrayImage(pixels=pixels / 255.0, maxval=255)


def load_ply_ascii(path) -> np.ndarray:
    """Vértices (x, y, z) de um PLY ASCII via plyfile; demais propriedades e elementos ignorados."""
    p = Path(path)
    if not p.is_file():
        raise ParseError(p, None, "arquivo não encontrado")
    try:
        ply = PlyData.read(str(p))
    except PlyHeaderParseError as e:
        raise ParseError(p, e.line, e.message) from None
    except PlyElementParseError as e:
        where = f"elemento {e.element.name}" if e.element is not None else "corpo"
        if e.row is not None:
            where += f", registro {e.row + 1}"
        raise ParseError(p, None, f"{where}: {e.message}") from None
    if not ply.text:
        raise ParseError(p, 2, "apenas PLY ASCII é suportado")
    try:
        vertex = ply["vertex"]
    except KeyError:
        raise ParseError(p, None, "PLY sem elemento vertex") from None
    names = {prop.name for prop in vertex.properties}
    if not {"x", "y", "z"} <= names:
        raise ParseError(p, None, "elemento vertex sem propriedades x, y, z")
    pts = np.column_stack([np.asarray(vertex[c], dtype=float) for c in ("x", "y", "z")])
    if not np.all(np.isfinite(pts)):
        raise ParseError(p, None, "coordenada não finita")
    return pts.reshape(-1, 3)


def _fmt(v: float | None) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.6g}"


def format_results_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_HEADER)
    for r in sorted(rows, key=ResultRow.sort_key):
        w.writerow([r.method, r.axis, r.family, _fmt(r.sigma), r.segment, _fmt(r.alpha), _fmt(r.theta),
                    _fmt(r.kappa), _fmt(r.mse), _fmt(r.psnr), _fmt(r.ssim)])
    return buf.getvalue()


def write_results_csv(rows: Iterable[ResultRow], path) -> Path:
    p = Path(path)
    p.write_text(format_results_csv(rows), encoding="utf-8", newline="")
    return p


# ==========================
# 4. Blocos de imagem
# ==========================
def block_slices(shape: tuple[int, int], size: int = 8) -> list[tuple[slice, slice]]:
    """Blocos não sobrepostos em ordem row-major; bordas viram blocos menores."""
    h, w = shape
    return [(slice(r, min(r + size, h)), slice(c, min(c + size, w)))
            for r in range(0, h, size) for c in range(0, w, size)]


def partition_blocks(image: np.ndarray, size: int = 8) -> list[np.ndarray]:
    return [image[sl].ravel() for sl in block_slices(image.shape, size)]


def reassemble_blocks(vectors: list[np.ndarray], shape: tuple[int, int], size: int = 8) -> np.ndarray:
    out = np.empty(shape)
    slices = block_slices(shape, size)
    if len(vectors) != len(slices):
        raise DimensionError(f"esperados {len(slices)} blocos, recebidos {len(vectors)}")
    for sl, vec in zip(slices, vectors):
        out[sl] = np.asarray(vec, dtype=float).reshape(sl[0].stop - sl[0].start, sl[1].stop - sl[1].start)
    return out


# ==========================
# 5. Fixtures sintéticas
# ==========================
def synthetic_series(length: int = 300, seed: int = config.SEED) -> np.ndarray:
    """Série diária suave: tendência + duas sazonalidades + flutuação pequena."""
    t = np.arange(length, dtype=float)
    rng = np.random.default_rng(seed)
    return (10.0 + 0.01 * t + 3.0 * np.sin(2 * np.pi * t / 50.0)
            + 1.5 * np.sin(2 * np.pi * t / 17.0 + 0.3) + 0.3 * rng.standard_normal(length))


def synthetic_image(size: int = 32, seed: int = config.SEED) -> GrayImage:
    """Gradiente diagonal com um disco claro, quantizado em 8 bits."""
    r, c = np.mgrid[0:size, 0:size].astype(float)
    img = 0.15 + 0.5 * (r + c) / max(2 * (size - 1), 1)
    disk = (r - size * 0.6) ** 2 + (c - size * 0.4) ** 2 <= (size * 0.22) ** 2
    img[disk] = 0.9
    rng = np.random.default_rng(seed)
    img = np.clip(img + 0.02 * rng.standard_normal(img.shape), 0.0, 1.0)
    return GrayImage(pixels=np.round(img * 255) / 255, maxval=255)


def synthetic_pointcloud(n: int = 300, seed: int = config.SEED) -> np.ndarray:
    """Superfície ondulada voxelizada (coordenadas inteiras, escala ~512)."""
    rng = np.random.default_rng(seed)
    u, v = rng.random(n), rng.random(n)
    z = 256.0 + 64.0 * np.sin(2 * np.pi * u) * np.cos(2 * np.pi * v)
    return np.round(np.column_stack([512.0 * u, 512.0 * v, z]))


# ==========================
# 6. Pipelines
# ==========================
def _map(fn, items: list, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


class _Denoiser:
    """Otimiza um método para um par (y, x) e avisa uma vez sobre resíduo imaginário."""

    def __init__(self, cfg: ExperimentConfig, on_event: EventHook | None):
        self.cfg = cfg
        self.on_event = on_event
        cells = len(cfg.theta_grid) * len(cfg.alpha_grid)
        self.cache = OperatorCache(maxsize=max(256, cells + 8))
        self._warned = False
        self._lock = threading.Lock()

    def __call__(self, spec: GraphSpectrum, method: MethodSpec, y: np.ndarray, x: np.ndarray) -> OptResult:
        if np.array_equal(y, x):
            return self._noiseless(method, y)
        cfg = self.cfg
        if cfg.optimizer == "grid":
            res = grid_search(spec, method.kind, method.axis, method.family, y, x,
                              cfg.theta_grid, cfg.alpha_grid, kappa=cfg.kappa, cache=self.cache)
        else:
            res = gradient_descent(spec, method.kind, method.axis, method.family, y, x,
                                   lr=cfg.lr, epochs=cfg.epochs)
        self._check_residual(res, x, method)
        return res

    def _noiseless(self, method: MethodSpec, y: np.ndarray) -> OptResult:
        """σ = 0: h = 1 reconstrói y exatamente em qualquer operador; parâmetros ficam no primeiro ponto da grade."""
        kind = method.kind
        if self.cfg.optimizer == "grid":
            theta = self.cfg.theta_grid[0] if kind.uses_rotation else 0.0
            alpha = self.cfg.alpha_grid[0] if kind.uses_alpha else 1.0
            kappa = self.cfg.kappa
        else:
            theta, alpha, kappa = 0.0, 1.0, 1.0
        return OptResult(theta=theta, alpha=alpha, kappa=kappa, h=FilterH.ones(y.shape[0]), mse=0.0,
                         kind=kind, axis=method.axis, family=method.family, estimate=y.copy())

    def _check_residual(self, res: OptResult, x: np.ndarray, method: MethodSpec):
        limit = config.IMAG_RESIDUAL_RATIO * max(float(np.linalg.norm(x)), 1e-300)
        if res.imag_residual <= limit:
            return
        with self._lock:
            if self._warned:
                return
            self._warned = True
        log.warning("resíduo imaginário descartado %.3e (> %.1e·‖x‖) em %s",
                    res.imag_residual, config.IMAG_RESIDUAL_RATIO, method.label)
        if self.on_event:
            self.on_event("IMAG_RESIDUAL", {"method": method.label, "residual": res.imag_residual})


def _row(method: MethodSpec, sigma: float, segment: str, params: tuple[float, float, float],
         mse_value: float, ssim_value: float | None = None) -> ResultRow:
    theta, alpha, kappa = params
    return ResultRow(
        method=method.label,
        axis=method.axis.value if method.axis else "-",
        family=method.family.value if method.family else "-",
        sigma=float(sigma), segment=segment,
        alpha=alpha, theta=theta, kappa=kappa,
        mse=mse_value, psnr=psnr(mse_value), ssim=ssim_value,
    )


def _emit(on_event: EventHook | None, row: ResultRow):
    if on_event:
        on_event("CELL_DONE", {"method": row.method, "axis": row.axis, "family": row.family,
                               "sigma": row.sigma, "segment": row.segment, "mse": row.mse})


def _circular_mean(angles) -> float:
    """Média de ângulos em [0, 2π); 0.1 e 2π − 0.1 dão ≈ 0, não π."""
    a = np.asarray(angles, dtype=float)
    if a.size and np.all(a == a[0]):
        return float(a[0])
    return float(np.angle(np.mean(np.exp(1j * a))) % (2 * math.pi))


def _mean_params(results: list[OptResult]) -> tuple[float, float, float]:
    return (_circular_mean([r.theta for r in results]),
            float(np.mean([r.alpha for r in results])),
            float(np.mean([r.kappa for r in results])))


def run_timeseries(cfg: ExperimentConfig, series=None, on_event: EventHook | None = None) -> list[ResultRow]:
    if series is None:
        series = load_signal_csv(cfg.input) if cfg.input else synthetic_series(max(cfg.checkpoints), cfg.seed)
    series = np.asarray(series, dtype=float)
    den = _Denoiser(cfg, on_event)
    rows: list[ResultRow] = []
    for seg_idx, t in enumerate(cfg.checkpoints):
        if t < 2 or t > series.shape[0]:
            raise ParameterError(f"checkpoint t={t} fora de [2, {series.shape[0]}]")
        if cfg.knn_k >= t:
            raise ParameterError(f"k={cfg.knn_k} deve ser menor que t={t}")
        x = series[:t]
        spec = build_spectrum(gso(sequence_graph(t, cfg.knn_k), cfg.gso_kind))
        for si, sigma in enumerate(cfg.noise_sigmas):
            y = add_gaussian_noise(x, sigma, derive_seed(cfg.seed, seg_idx, si))
            results = _map(lambda m: den(spec, m, y, x), list(cfg.methods), cfg.threads)
            for method, res in zip(cfg.methods, results):
                row = _row(method, sigma, str(t), (res.theta, res.alpha, res.kappa), mse(res.estimate, x))
                _emit(on_event, row)
                rows.append(row)
    return sorted(rows, key=ResultRow.sort_key)


def run_image(cfg: ExperimentConfig, image: GrayImage | None = None,
              on_event: EventHook | None = None) -> list[ResultRow]:
    if image is None:
        image = load_pgm(cfg.input) if cfg.input else synthetic_image(32, cfg.seed)
    segment = Path(cfg.input).stem if cfg.input else "synthetic"
    clean = image.pixels
    slices = block_slices(clean.shape, 8)
    spectra: dict[tuple[int, int], GraphSpectrum] = {}
    for sl in slices:
        bshape = (sl[0].stop - sl[0].start, sl[1].stop - sl[1].start)
        if bshape not in spectra:
            spectra[bshape] = build_spectrum(gso(image_block_graph(*bshape), cfg.gso_kind))

    den = _Denoiser(cfg, on_event)
    rows: list[ResultRow] = []
    for si, sigma in enumerate(cfg.noise_sigmas):
        noisy = add_gaussian_noise(clean.ravel(), sigma / image.maxval,
                                   derive_seed(cfg.seed, 0, si)).reshape(clean.shape)
        for method in cfg.methods:
            def block(sl, method=method):
                bshape = (sl[0].stop - sl[0].start, sl[1].stop - sl[1].start)
                return den(spectra[bshape], method, noisy[sl].ravel(), clean[sl].ravel())

            results = _map(block, slices, cfg.threads)
            est = reassemble_blocks([r.estimate for r in results], clean.shape, 8)
            s = ssim(est, clean) if min(clean.shape) >= SSIM_MIN_SIDE else None
            row = _row(method, sigma, segment, _mean_params(results), mse(est, clean), s)
            _emit(on_event, row)
            rows.append(row)
    return sorted(rows, key=ResultRow.sort_key)


def run_pointcloud(cfg: ExperimentConfig, points=None, on_event: EventHook | None = None) -> list[ResultRow]:
    if points is None:
        points = load_ply_ascii(cfg.input) if cfg.input else synthetic_pointcloud(300, cfg.seed)
    clean = np.asarray(points, dtype=float)
    if clean.ndim != 2 or clean.shape[1] != 3 or clean.shape[0] == 0:
        raise DimensionError(f"nuvem deve ser (n, 3) com n >= 1 (forma {clean.shape})")
    segment = Path(cfg.input).stem if cfg.input else "synthetic"
    diag = float(np.linalg.norm(clean.max(axis=0) - clean.min(axis=0))) or 1.0

    den = _Denoiser(cfg, on_event)
    rows: list[ResultRow] = []
    for si, sigma in enumerate(cfg.noise_sigmas):
        noisy = add_gaussian_noise(clean.ravel(), sigma, derive_seed(cfg.seed, 0, si)).reshape(clean.shape)
        part = pointcloud_patches(noisy, cfg.max_patch, cfg.patch_k, threads=cfg.threads)
        spectra = [build_spectrum(gso(p.graph, cfg.gso_kind)) for p in part.patches]
        work = [(pi, ch) for pi in range(len(part.patches)) for ch in range(3)]
        for method in cfg.methods:
            def channel(item, method=method):
                pi, ch = item
                idx = part.patches[pi].indices
                return den(spectra[pi], method, noisy[idx, ch], clean[idx, ch])

            results = _map(channel, work, cfg.threads)
            est = np.empty_like(clean)
            for (pi, ch), res in zip(work, results):
                est[part.patches[pi].indices, ch] = res.estimate
            row = _row(method, sigma, segment, _mean_params(results), mse(est / diag, clean / diag))
            _emit(on_event, row)
            rows.append(row)
    return sorted(rows, key=ResultRow.sort_key)


RUNNERS = {
    "timeseries": run_timeseries,
    "image": run_image,
    "pointcloud": run_pointcloud,
}


def run_experiment(cfg: ExperimentConfig, on_event: EventHook | None = None) -> list[ResultRow]:
    return RUNNERS[cfg.pipeline](cfg, on_event=on_event)


# ==========================
# 7. Melhor eixo
# ==========================
_AXIS_ORDER = {a.value: i for i, a in enumerate(AxisKind)}


def best_axis_rows(rows: Iterable[ResultRow]) -> list[ResultRow]:
    """Por (method, family, sigma, segment), a linha de menor MSE; empate: roll < pitch < yaw."""
    best: dict[tuple, ResultRow] = {}
    for r in rows:
        key = (r.method, r.family, r.sigma, r.segment)
        cur = best.get(key)
        rank = (r.mse, _AXIS_ORDER.get(r.axis, -1))
        if cur is None or rank < (cur.mse, _AXIS_ORDER.get(cur.axis, -1)):
            best[key] = r
    return sorted(best.values(), key=ResultRow.sort_key)
