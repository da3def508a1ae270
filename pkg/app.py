# -*- coding: utf-8 -*-
"""Aplicação Flask: API JSON sobre a biblioteca espectral.

TOC:
    1. Imports & App init
    2. Helpers (bad_request, leitura do payload)
    3. Rotas: Health
    4. REST: Transformada
    5. REST: Denoise (registrado no diário)
    6. REST: Propriedades
    7. REST: Diário de execuções
    8. Rotas util (__routes__, __dbdiag__)
    9. Main guard
"""
from flask import Flask, request, jsonify
import numpy as np

import config
import db
from db import RunJournal, bootstrap_db, get_conn, get_run, list_runs, run_logs
from filtering import gradient_descent, grid_search
from graphs import Graph, graph_from_edges, gso
from properties import check_properties
from rotations import RotationSpec
from spectral import apply, apply_inverse, build_operator, build_spectrum, parse_kind, spectral_concentration


app = Flask(__name__)
# Cria/atualiza o banco automaticamente na subida (idempotente)
bootstrap_db()


# ==========================
# Helpers
# ==========================
def bad_request(msg: str, extra: dict | None = None):
    payload = {"error": msg}
    if extra:
        payload.update(extra)
    return jsonify(payload), 400


@app.errorhandler(ValueError)
def _value_error(e):
    # erros de domínio (errors.py) herdam de ValueError
    return bad_request(str(e))


def _payload() -> dict:
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise ValueError("corpo deve ser um objeto JSON")
    return data


def _graph(data: dict) -> Graph:
    if "weights" in data:
        w = np.asarray(data["weights"], dtype=float)
        if w.ndim != 2:
            raise ValueError("weights deve ser matriz n×n")
        return Graph(w.shape[0], w)
    if "edges" in data:
        if "n" not in data:
            raise ValueError("edges exige n")
        return graph_from_edges(int(data["n"]), data["edges"])
    raise ValueError("informe weights (matriz) ou edges + n")


def _rotation(data: dict) -> RotationSpec:
    return RotationSpec(
        axis=data.get("axis", "yaw"),
        family=data.get("family", "degeneracy_friendly"),
        theta=config.as_float(data.get("theta"), 0.0),
        kappa=config.as_float(data.get("kappa"), 1.0),
    )


def _vector(data: dict, key: str) -> np.ndarray:
    if key not in data:
        raise ValueError(f"campo obrigatório ausente: {key}")
    return np.asarray(data[key], dtype=float)


# ==========================
# Rotas: Health
# ==========================
@app.get("/health")
def health():
    return jsonify({"ok": True})


# ==========================
# REST: Transformada
# ==========================
@app.post("/api/transform")
def api_transform():
    """Aplica forward (ou inverse=true) ao sinal; resposta em partes re/im.

    Com inverse=true o sinal pode vir como {"re": [...], "im": [...]}.
    """
    data = _payload()
    spec = build_spectrum(gso(_graph(data), data.get("gso", "laplacian")))
    op = build_operator(spec, data.get("kind", "gft"), _rotation(data), config.as_float(data.get("alpha"), 1.0))
    if data.get("inverse"):
        if "re" in data:
            re_ = _vector(data, "re")
            sig = re_ + 1j * np.asarray(data.get("im", np.zeros_like(re_)), dtype=float)
        else:
            sig = _vector(data, "signal")
        out = apply_inverse(op, sig)
    else:
        out = apply(op, _vector(data, "signal"))
    resp = {"kind": op.kind.value, "re": out.real.tolist(), "im": out.imag.tolist()}
    if data.get("concentration") and not data.get("inverse"):
        resp["concentration"] = spectral_concentration(op, _vector(data, "signal"), int(data["concentration"]))
    return jsonify(resp)


# ==========================
# REST: Denoise
# ==========================
@app.post("/api/denoise")
def api_denoise():
    data = _payload()
    kind = parse_kind(data.get("kind", "agfrft_i"))
    y = _vector(data, "noisy")
    x = _vector(data, "clean")
    optimizer = str(data.get("optimizer", "grid")).lower()
    if optimizer not in ("grid", "gd"):
        return bad_request("optimizer deve ser grid ou gd")
    spec = build_spectrum(gso(_graph(data), data.get("gso", "laplacian")))
    params = {k: v for k, v in data.items() if k not in ("noisy", "clean", "weights", "edges")}

    with RunJournal("api/denoise", params) as journal:
        if optimizer == "grid":
            res = grid_search(
                spec, kind, data.get("axis"), data.get("family"), y, x,
                data.get("theta_grid") or config.theta_grid(),
                data.get("alpha_grid") or config.alpha_grid(),
                kappa=config.as_float(data.get("kappa"), 1.0),
            )
        else:
            res = gradient_descent(
                spec, kind, data.get("axis"), data.get("family"), y, x,
                lr=config.as_float(data.get("lr"), config.LEARNING_RATE),
                epochs=int(data.get("epochs", config.EPOCHS)),
            )
        journal("CELL_DONE", {"kind": kind.value, "mse": res.mse})
        journal.linhas = 1

    app.logger.info("denoise run=%s kind=%s mse=%.6g", journal.run_id, kind.value, res.mse)
    return jsonify({
        "run_id": journal.run_id,
        "kind": res.kind.value,
        "axis": res.axis.value if res.axis else None,
        "family": res.family.value if res.family else None,
        "theta": res.theta,
        "alpha": res.alpha,
        "kappa": res.kappa,
        "mse": res.mse,
        "h": res.h.h.tolist(),
        "filtered": res.estimate.tolist(),
        "imag_residual": res.imag_residual,
        "trace_len": len(res.trace),
    })


# ==========================
# REST: Propriedades
# ==========================
@app.get("/api/properties")
def api_properties():
    try:
        n = int(request.args.get("n", 8))
        seed = int(request.args.get("seed", 0))
        tol = float(request.args.get("tol", 1e-9))
    except ValueError:
        return bad_request("n e seed inteiros, tol numérico")
    return jsonify(check_properties(n, seed, tol).to_dict())


# ==========================
# REST: Diário
# ==========================
@app.get("/api/runs")
def api_runs():
    return jsonify(list_runs(int(request.args.get("limit", 50))))


@app.get("/api/runs/<int:run_id>/logs")
def api_run_logs(run_id: int):
    if not get_run(run_id):
        return jsonify({"error": "execução não encontrada"}), 404
    return jsonify(run_logs(run_id))


# ==========================
# Rotas util
# ==========================
@app.get("/__routes__")
def __routes__():
    linhas = []
    for r in sorted(app.url_map.iter_rules(), key=lambda x: x.rule):
        linhas.append(f"{r.endpoint:25s}  {','.join(sorted(r.methods - {'HEAD','OPTIONS'})) or '-':10s}  {r.rule}")
    return "<pre>" + "\n".join(linhas) + "</pre>"


@app.get("/__dbdiag__")
def __dbdiag__():
    with get_conn() as conn:
        tabs = [r["name"] for r in conn.execute("SELECT name FROM sqlite_master WHERE type='table'").fetchall()]
    return jsonify({"db_path": db.DB_PATH, "tables": tabs})


# ==========================
# MAIN
# ==========================
if __name__ == "__main__":
    app.run(debug=True)
