# -*- coding: utf-8 -*-
"""properties.py

Bateria de propriedades executável (check-properties / GET /api/properties).

Roda sobre um GSO aleatório (Laplaciano de grafo ponderado, semente fixa) e
reporta cada propriedade como PASS, FAIL, EXPECTED-FAIL ou SKIP:
  - EXPECTED-FAIL: a família legacy não volta à identidade em θ = 0 (é o
    defeito que a família degeneracy_friendly corrige);
  - SKIP: propriedade sem sentido na dimensão pedida (ex.: n < 4) ou sem
    testemunha na grade (afirmações do tipo "não vale em geral").
O relatório é aprovado quando não há FAIL.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from errors import DimensionError
from filtering import objective, real_loss_gap, wiener_h
from graphs import gso, random_weighted_graph
from matcore import expm_skew, frac_power_unitary, sym_eig, unitarity_residual
from rotations import AxisKind, Family, RotationSpec, block_rotation_even, df_rotation, givens2, legacy_rotation
from spectral import TransformKind, apply, apply_inverse, build_operator, build_spectrum

PASS = "PASS"
FAIL = "FAIL"
EXPECTED_FAIL = "EXPECTED-FAIL"
SKIP = "SKIP"

THETAS = (0.0, 0.5, 1.0, 2.0, 3.0)
ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    status: str
    detail: str = ""


@dataclass
class PropertyReport:
    n: int
    seed: int
    tol: float
    checks: list[PropertyCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(PropertyCheck(name, PASS if passed else FAIL, detail))

    def to_dict(self) -> dict:
        return {"n": self.n, "seed": self.seed, "tol": self.tol, "ok": self.ok,
                "checks": [c.__dict__ for c in self.checks]}

    def lines(self) -> list[str]:
        return [f"{c.status:<14}{c.name}" + (f"  ({c.detail})" if c.detail else "") for c in self.checks]


def _fro(a) -> float:
    return float(np.linalg.norm(a, "fro"))


def _max(values) -> float:
    return max(values, default=0.0)


def check_properties(n: int = 8, seed: int = 0, tol: float = 1e-9) -> PropertyReport:
    if int(n) != n or n < 1:
        raise DimensionError(f"n deve ser inteiro >= 1 (recebido {n})")
    n = int(n)
    rng = np.random.default_rng(seed)
    rep = PropertyReport(n=n, seed=seed, tol=tol)
    eye = np.eye(n)

    # --- núcleos matriciais ---
    lap = gso(random_weighted_graph(n, rng), "laplacian")
    eig = sym_eig(lap)
    v = eig.eigenvectors
    recon = _fro(v @ np.diag(eig.eigenvalues) @ v.T - lap) / max(_fro(lap), 1.0)
    rep.add("sym_eig: reconstrução e ortonormalidade", recon <= 1e-10 and _fro(v.T @ v - eye) <= 1e-10,
            f"resíduo {recon:.2e}")

    half = frac_power_unitary(givens2(math.pi / 3), 0.5)
    rep.add("frac_power: R(π/3)^0.5 = R(π/6)", _fro(half - givens2(math.pi / 6)) <= 1e-12)

    if n >= 2:
        orth, det = 0.0, 0.0
        for _ in range(10):
            a = rng.standard_normal((n, n))
            o = expm_skew(a - a.T, float(rng.uniform(-3, 3)))
            orth = max(orth, _fro(o.T @ o - eye))
            det = max(det, abs(np.linalg.det(o) - 1.0))
        rep.add("expm_skew: ortogonal com det 1", orth <= 1e-10 and det <= 1e-8,
                f"ortogonalidade {orth:.2e}, det {det:.2e}")
    else:
        rep.checks.append(PropertyCheck("expm_skew: ortogonal com det 1", SKIP, "n < 2"))

    # --- rotações ---
    thetas = np.linspace(0.0, 2 * math.pi, 12)
    worst_o, worst_d = 0.0, 0.0
    for axis in AxisKind:
        for kappa in (0.5, 1.0, 2.0):
            for th in thetas:
                r = df_rotation(RotationSpec(axis, Family.DEGENERACY_FRIENDLY, float(th), kappa), n)
                worst_o = max(worst_o, _fro(r.T @ r - eye))
                worst_d = max(worst_d, abs(np.linalg.det(r) - 1.0))
    rep.add("df_rotation ∈ SO(n)", worst_o <= 1e-9 and worst_d <= 1e-7,
            f"ortogonalidade {worst_o:.2e}, det {worst_d:.2e}")

    exact = all(np.array_equal(df_rotation(RotationSpec(a, theta=0.0, kappa=k), n), eye)
                for a in AxisKind for k in (0.5, 1.0, 2.0))
    rep.add("df_rotation(θ=0) = I exato", exact)

    legacy = [legacy_rotation(a, n, float(th)) for a in AxisKind for th in thetas]
    leg_o = _max(_fro(r.T @ r - eye) for r in legacy)
    rep.add("legacy_rotation ortogonal", leg_o <= 1e-9, f"{leg_o:.2e}")

    if n >= 4:
        dev = min(_fro(legacy_rotation(a, n, 0.0) - eye) for a in AxisKind)
        status = EXPECTED_FAIL if dev > 0.1 else FAIL
        rep.checks.append(PropertyCheck("legacy_rotation(θ=0) = I", status, f"‖R(0) − I‖_F = {dev:.3f}"))
    else:
        rep.checks.append(PropertyCheck("legacy_rotation(θ=0) = I", SKIP, "n < 4 cai nos casos base"))

    if n >= 4 and n % 2 == 0:
        mats = [df_rotation(RotationSpec(a, theta=0.3), n) for a in AxisKind]
        dist = min(_fro(mats[i] - mats[j]) for i in range(3) for j in range(i + 1, 3))
        rep.add("eixos distintos (θ=0.3)", dist > 1e-6, f"menor distância {dist:.2e}")
    else:
        rep.checks.append(PropertyCheck("eixos distintos (θ=0.3)", SKIP, "só para n par >= 4"))

    # --- transformadas ---
    spec = build_spectrum(lap)
    x = rng.standard_normal(n)

    def op(kind, theta=0.0, alpha=1.0, axis=AxisKind.YAW):
        return build_operator(spec, kind, RotationSpec(axis, theta=theta), alpha)

    unit, inv, parseval, roundtrip = 0.0, 0.0, 0.0, 0.0
    for kind in TransformKind:
        for th in THETAS:
            for al in ALPHAS:
                o = op(kind, th, al)
                unit = max(unit, unitarity_residual(o.forward))
                inv = max(inv, _fro(o.forward @ o.inverse - eye))
                parseval = max(parseval, abs(np.linalg.norm(apply(o, x)) - np.linalg.norm(x)))
                roundtrip = max(roundtrip, float(np.linalg.norm(apply_inverse(o, apply(o, x)) - x)))
    rep.add("unitariedade (5 tipos, grade 5×5)", unit <= tol, f"{unit:.2e}")
    rep.add("inversa exata", inv <= tol, f"{inv:.2e}")
    rep.add("Parseval", parseval <= tol, f"{parseval:.2e}")
    rep.add("ida e volta", roundtrip <= 1e-8, f"{roundtrip:.2e}")

    ident = _fro(op(TransformKind.AGFRFT_I, 0.0, 0.0).forward - eye)
    rep.add("θ=0, α=0 -> identidade", ident <= tol, f"{ident:.2e}")

    red = 0.0
    for al in ALPHAS:
        g = op(TransformKind.GFRFT, 0.0, al).forward
        red = max(red, _fro(op(TransformKind.AGFRFT_I, 0.0, al).forward - g),
                  _fro(op(TransformKind.AGFRFT_II, 0.0, al).forward - g))
    for th in THETAS:
        a = op(TransformKind.AGFT, th).forward
        red = max(red, _fro(op(TransformKind.AGFRFT_I, th, 1.0).forward - a),
                  _fro(op(TransformKind.AGFRFT_II, th, 1.0).forward - a))
    rep.add("reduções (GFRFT / AGFT)", red <= 1e-10, f"{red:.2e}")

    add_i, add_ii = 0.0, 0.0
    for th in THETAS[1:]:
        for a1 in ALPHAS[1:]:
            for a2 in ALPHAS[1:]:
                lhs = op(TransformKind.AGFRFT_I, th, a1).forward @ op(TransformKind.AGFRFT_I, th, a2).forward
                add_i = max(add_i, _fro(lhs - op(TransformKind.AGFRFT_I, th, a1 + a2).forward))
                lhs = op(TransformKind.AGFRFT_II, th, a1).forward @ op(TransformKind.AGFRFT_II, th, a2).forward
                add_ii = max(add_ii, _fro(lhs - op(TransformKind.AGFRFT_II, th, a1 + a2).forward))
    rep.add("aditividade tipo I", add_i <= tol, f"{add_i:.2e}")
    if add_ii > 1e-4:
        rep.add("tipo II não aditivo (testemunha)", True, f"{add_ii:.2e}")
    else:
        rep.checks.append(PropertyCheck("tipo II não aditivo (testemunha)", SKIP, f"máximo {add_ii:.2e}"))

    naive = 0.0
    for th in THETAS[1:]:
        for al in ALPHAS[1:-1]:
            o = op(TransformKind.AGFRFT_II, th, al)
            naive_inv = spec.gft_eig.power(-al) @ df_rotation(RotationSpec(AxisKind.YAW, theta=th), n).T
            naive = max(naive, _fro(o.forward @ naive_inv - eye))
    if naive > 1e-6:
        rep.add("tipo II: F^{−α}·Rᵀ não é inversa", True, f"{naive:.2e}")
    else:
        rep.checks.append(PropertyCheck("tipo II: F^{−α}·Rᵀ não é inversa", SKIP, f"máximo {naive:.2e}"))

    # --- Wiener ---
    y = x + 0.3 * rng.standard_normal(n)
    worst = 0.0
    for kind in TransformKind:
        o = op(kind, 1.0, 0.5)
        h = wiener_h(o, y, x).h
        base = objective(o, h, y, x)
        for k in range(n):
            for step in (1e-3, -1e-3):
                hp = h.copy()
                hp[k] += step
                worst = min(worst, objective(o, hp, y, x) - base)
    rep.add("Wiener: ótimo por coordenada (objetivo espectral)", worst >= -1e-12, f"menor variação {worst:.2e}")

    # perda real: ótima só para núcleos reais; nos fracionários reporta a distância
    gaps = {}
    for kind in TransformKind:
        wl, best = real_loss_gap(op(kind, 1.0, 0.5), y, x)
        gaps[kind] = wl - best
    real_gap = max(gaps[k] for k in TransformKind if not k.uses_alpha)
    rep.add("Wiener: ótimo na perda real (GFT/AGFT)", real_gap <= 1e-9 * max(1.0, float(x @ x)),
            f"{real_gap:.2e}")
    frac_gap = max(gaps[k] for k in TransformKind if k.uses_alpha)
    rep.add("Wiener: distância à perda real ótima (tipos fracionários)", frac_gap >= -1e-9,
            f"{frac_gap:.2e}")

    s_m = block_rotation_even(max(n // 2, 1), 0.0)
    rep.add("S_M(0) = I", np.array_equal(s_m, np.eye(s_m.shape[0])))
    return rep
