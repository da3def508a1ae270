# -*- coding: utf-8 -*-
"""graphs.py

Construção de grafos e GSOs para os três pipelines:
  - séries temporais : k-NN sobre os índices 0..t−1 (pesos binários)
  - imagens          : 4-NN sobre as coordenadas de pixel de um bloco 8×8
  - nuvens de pontos : partição em patches (mediana no eixo mais longo) e
                       10-NN gaussiano por patch

Simetrização sempre por união: existe aresta (i,j) se i escolheu j OU j escolheu i.
Empate de distância: vence o menor índice (argsort estável).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

import config
from errors import DimensionError, ParameterError


class GsoKind(str, Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"


class Weighting(str, Enum):
    BINARY = "binary"
    GAUSSIAN = "gaussian"


def parse_gso_kind(value) -> GsoKind:
    if isinstance(value, GsoKind):
        return value
    try:
        return GsoKind(str(value).strip().lower())
    except ValueError:
        raise ParameterError(f"gso inválido: {value!r} (use adjacency ou laplacian)") from None


def _weighting(value) -> Weighting:
    if isinstance(value, Weighting):
        return value
    try:
        return Weighting(str(value).strip().lower())
    except ValueError:
        raise ParameterError(f"ponderação inválida: {value!r} (use binary ou gaussian)") from None


@dataclass(frozen=True)
class Graph:
    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.n, self.n):
            raise DimensionError(f"pesos {w.shape} incompatíveis com n={self.n}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ParameterError("pesos devem ser finitos e >= 0")
        if not np.array_equal(w, w.T):
            raise ParameterError("matriz de pesos deve ser simétrica")
        if np.any(np.diag(w) != 0):
            raise ParameterError("grafo não admite laços (diagonal deve ser zero)")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights)))

    def degrees(self) -> np.ndarray:
        return np.count_nonzero(self.weights, axis=1)


@dataclass(frozen=True)
class Patch:
    indices: np.ndarray  # índices globais, crescentes
    graph: Graph


@dataclass(frozen=True)
class PatchPartition:
    patches: tuple[Patch, ...]
    max_patch_size: int

    def __len__(self) -> int:
        return len(self.patches)


def _points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise DimensionError(f"pontos devem ser uma sequência de vetores (forma {pts.shape})")
    if not np.all(np.isfinite(pts)):
        raise ParameterError("pontos com coordenadas não finitas")
    return pts


def knn_graph(points, k: int, weighting="binary", sigma_w: float | None = None) -> Graph:
    """k-NN euclidiano, simetrizado por união.

    gaussian: w = exp(−d²/(2σ_w²)); sem σ_w usa a média das distâncias k-NN
    (1.0 se essa média for zero).
    """
    pts = _points(points)
    n = pts.shape[0]
    if k < 1 or k >= n:
        raise ParameterError(f"k deve estar em [1, n−1] (k={k}, n={n})")
    weighting = _weighting(weighting)

    dist = cdist(pts, pts)
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    nearest = np.argsort(masked, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = nearest.ravel()

    mask = np.zeros((n, n), dtype=bool)
    mask[rows, cols] = True
    mask |= mask.T

    if weighting is Weighting.BINARY:
        w = mask.astype(float)
    else:
        if sigma_w is None:
            sigma_w = float(dist[rows, cols].mean()) or 1.0
        if sigma_w <= 0:
            raise ParameterError("sigma_w deve ser positivo")
        w = np.where(mask, np.exp(-(dist ** 2) / (2.0 * sigma_w ** 2)), 0.0)
    return Graph(n, np.maximum(w, w.T))


def sequence_graph(length: int, k: int, weighting="binary") -> Graph:
    """Nós = observações diárias 0..length−1."""
    return knn_graph(np.arange(length, dtype=float), k, weighting)


def image_block_graph(rows: int = 8, cols: int = 8, k: int = 4) -> Graph:
    """Grafo de pixels de um bloco (row-major). Blocos parciais usam rows/cols menores."""
    n = rows * cols
    if n < 1:
        raise DimensionError("bloco vazio")
    if n == 1:
        return Graph(1, np.zeros((1, 1)))
    r, c = np.divmod(np.arange(n), cols)
    return knn_graph(np.column_stack([r, c]), min(k, n - 1))


def _median_split(pts: np.ndarray, idx: np.ndarray, max_patch: int) -> list[np.ndarray]:
    if idx.size <= max_patch:
        return [np.sort(idx)]
    sub = pts[idx]
    axis = int(np.argmax(sub.max(axis=0) - sub.min(axis=0)))
    order = idx[np.argsort(sub[:, axis], kind="stable")]
    half = order.size // 2
    return _median_split(pts, order[:half], max_patch) + _median_split(pts, order[half:], max_patch)


def _patch_graph(pts: np.ndarray, k: int, sigma_w: float | None) -> Graph:
    s = pts.shape[0]
    if s == 1:
        return Graph(1, np.zeros((1, 1)))
    return knn_graph(pts, min(k, s - 1), Weighting.GAUSSIAN, sigma_w)


def pointcloud_patches(points, max_patch: int = config.MAX_PATCH, k: int = config.PATCH_K,
                       sigma_w: float | None = None, threads: int = 1) -> PatchPartition:
    pts = _points(points)
    if pts.shape[0] == 0:
        raise ParameterError("nuvem de pontos vazia")
    if max_patch < 1 or k < 1:
        raise ParameterError("max_patch e k devem ser >= 1")
    subsets = _median_split(pts, np.arange(pts.shape[0]), max_patch)
    if threads > 1 and len(subsets) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            graphs = list(ex.map(lambda ix: _patch_graph(pts[ix], k, sigma_w), subsets))
    else:
        graphs = [_patch_graph(pts[ix], k, sigma_w) for ix in subsets]
    patches = tuple(Patch(indices=ix, graph=g) for ix, g in zip(subsets, graphs))
    return PatchPartition(patches=patches, max_patch_size=max_patch)


def gso(g: Graph, kind="laplacian") -> np.ndarray:
    kind = parse_gso_kind(kind)
    w = np.array(g.weights)
    if kind is GsoKind.ADJACENCY:
        return w
    return np.diag(w.sum(axis=1)) - w


def graph_from_edges(n: int, edges) -> Graph:
    """Lista não direcionada (i, j, w) com índices 0-based; repetição sobrescreve."""
    if n < 1:
        raise DimensionError(f"n deve ser >= 1 (recebido {n})")
    w = np.zeros((n, n))
    for e in edges:
        i, j, weight = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= i < n and 0 <= j < n):
            raise ParameterError(f"aresta ({i},{j}) fora de [0, {n})")
        if i == j:
            raise ParameterError(f"laço em {i} não permitido")
        w[i, j] = w[j, i] = weight
    return Graph(n, w)


def random_weighted_graph(n: int, rng: np.random.Generator, density: float = 0.6) -> Graph:
    """Grafo aleatório com pesos em (0.1, 1]; usado pela bateria de propriedades."""
    upper = np.triu(rng.uniform(0.1, 1.0, size=(n, n)) * (rng.random((n, n)) < density), 1)
    return Graph(n, upper + upper.T)
