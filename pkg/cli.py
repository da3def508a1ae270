# -*- coding: utf-8 -*-
"""cli.py - linha de comando.

Uso rápido:
  python cli.py transform --graph g.csv --signal x.csv --kind agfrft-ii --theta 1 --alpha 0.5
  python cli.py denoise-grid --graph g.csv --noisy y.csv --clean x.csv --kind agfrft-i
  python cli.py denoise-gd   --graph g.csv --noisy y.csv --clean x.csv --epochs 1000
  python cli.py timeseries --in serie.csv --t 100,200,300 --sigma 0.5,1.0,1.5
  python cli.py image --in img.pgm --sigma 20 --optimizer gd
  python cli.py pointcloud --in nuvem.ply --sigma 20
  python cli.py check-properties --n 8

Códigos de saída: 0 ok, 1 erro de execução (arquivo, domínio), 2 erro de uso.
Precedência de configuração: default < arquivo --config < flag explícita.
Com --db PATH cada execução vai para o diário SQLite (runs / run_logs).
"""
from __future__ import annotations

import contextlib
import functools
import logging
import math
import sys

import click
import numpy as np
from click.core import ParameterSource

import config
import db
from filtering import gradient_descent, grid_search
from harness import (
    ExperimentConfig,
    ResultRow,
    best_axis_rows,
    canonical_keys,
    format_results_csv,
    load_complex_csv,
    load_edges_csv,
    load_signal_csv,
    run_experiment,
)
from graphs import gso
from properties import check_properties
from rotations import RotationSpec
from spectral import apply, apply_inverse, build_operator, build_spectrum, spectral_concentration

KINDS = click.Choice(["gft", "gfrft", "agft", "agfrft-i", "agfrft-ii"], case_sensitive=False)
AXES = click.Choice(["roll", "pitch", "yaw"], case_sensitive=False)
FAMILIES = click.Choice(["df", "degeneracy_friendly", "legacy"], case_sensitive=False)
GSOS = click.Choice(["adjacency", "laplacian"], case_sensitive=False)


def _domain_errors(fn):
    """ValueError/OSError viram ClickException (exit 1, mensagem no stderr)."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError) as e:
            raise click.ClickException(str(e)) from e
    return wrapper


def _journal(ctx: click.Context, comando: str, params: dict):
    if (ctx.obj or {}).get("db"):
        return db.RunJournal(comando, params)
    return contextlib.nullcontext(None)


def _write_lines(text: str, out: str):
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _spectrum(graph_path: str, n: int | None, gso_kind: str):
    return build_spectrum(gso(load_edges_csv(graph_path, n), gso_kind))


@click.group()
@click.option("--db", "db_path", type=click.Path(dir_okay=False), default=None,
              help="Registra a execução no diário SQLite neste arquivo.")
@click.option("-v", "--verbose", is_flag=True, help="Log em nível INFO.")
@click.pass_context
def cli(ctx: click.Context, db_path: str | None, verbose: bool):
    """Transformadas espectrais em grafos (GFT, GFRFT, AGFT, AGFRFT I/II) e denoising."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    if db_path:
        db.set_db_path(db_path)
    ctx.obj["db"] = db_path


# ==========================
# transform
# ==========================
def _graph_options(fn):
    for opt in reversed([
        click.option("--graph", "graph_path", required=True, type=click.Path(),
                     help="CSV de arestas i,j,w (0-based)."),
        click.option("--n", "n", type=int, default=None, help="Número de nós (default: maior índice + 1)."),
        click.option("--gso", "gso_kind", type=GSOS, default="laplacian", show_default=True),
        click.option("--axis", type=AXES, default="yaw", show_default=True),
        click.option("--family", type=FAMILIES, default="df", show_default=True),
    ]):
        fn = opt(fn)
    return fn


@cli.command("transform")
@_graph_options
@click.option("--signal", "signal_path", required=True, type=click.Path(),
              help="CSV do sinal (um valor por linha); com --inverse, re,im.")
@click.option("--kind", type=KINDS, default="gft", show_default=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--kappa", type=float, default=1.0, show_default=True)
@click.option("--inverse", is_flag=True, help="Aplica a inversa em vez da direta.")
@click.option("--concentration", type=int, default=None,
              help="Reporta no stderr a fração de energia nos K maiores coeficientes.")
@click.option("--out", default="-", show_default=True, help="Arquivo de saída ('-' = stdout).")
@_domain_errors
def cmd_transform(graph_path, n, gso_kind, axis, family, signal_path, kind, theta, alpha, kappa,
                  inverse, concentration, out):
    """Espectro complexo (CSV re,im) de um sinal no grafo."""
    spec = _spectrum(graph_path, n, gso_kind)
    op = build_operator(spec, kind, RotationSpec(axis, family, theta, kappa), alpha)
    if inverse:
        result = apply_inverse(op, load_complex_csv(signal_path))
    else:
        signal = load_signal_csv(signal_path)
        result = apply(op, signal)
        if concentration is not None:
            ratio = spectral_concentration(op, signal, concentration)
            click.echo(f"concentração (k={concentration}): {ratio:.6f}", err=True)
    lines = ["re,im"] + [f"{z.real:.17g},{z.imag:.17g}" for z in result]
    _write_lines("\n".join(lines) + "\n", out)


# ==========================
# denoise-grid / denoise-gd
# ==========================
def _denoise_options(fn):
    for opt in reversed([
        click.option("--noisy", "noisy_path", required=True, type=click.Path(), help="Sinal observado y."),
        click.option("--clean", "clean_path", required=True, type=click.Path(), help="Sinal de referência x."),
        click.option("--kind", type=KINDS, default="agfrft-i", show_default=True),
        click.option("--out", default=None, help="Grava o sinal filtrado (CSV value)."),
    ]):
        fn = opt(fn)
    return fn


def _report(res, out: str | None):
    axis = res.axis.value if res.axis else "-"
    family = res.family.value if res.family else "-"
    click.echo(f"kind={res.kind.value} axis={axis} family={family} "
               f"theta={res.theta:.6g} alpha={res.alpha:.6g} kappa={res.kappa:.6g} mse={res.mse:.6g}")
    if out:
        _write_lines("value\n" + "".join(f"{v:.17g}\n" for v in res.estimate), out)


@cli.command("denoise-grid")
@_graph_options
@_denoise_options
@click.option("--theta-step", type=float, default=config.THETA_STEP, show_default=True)
@click.option("--alpha-step", type=float, default=config.ALPHA_STEP, show_default=True)
@click.option("--kappa", type=float, default=1.0, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=config.THREADS, show_default=True)
@click.pass_context
@_domain_errors
def cmd_denoise_grid(ctx, graph_path, n, gso_kind, axis, family, noisy_path, clean_path, kind, out,
                     theta_step, alpha_step, kappa, threads):
    """Grid search (θ externo, α interno) com filtro de Wiener por célula."""
    spec = _spectrum(graph_path, n, gso_kind)
    y, x = load_signal_csv(noisy_path), load_signal_csv(clean_path)
    params = {"kind": kind, "axis": axis, "family": family, "theta_step": theta_step, "alpha_step": alpha_step}
    with _journal(ctx, "denoise-grid", params) as journal:
        res = grid_search(spec, kind, axis, family, y, x, config.theta_grid(theta_step),
                          config.alpha_grid(alpha_step), kappa=kappa, threads=threads)
        if journal:
            journal("CELL_DONE", {"kind": res.kind.value, "mse": res.mse})
            journal.linhas = 1
    _report(res, out)


@cli.command("denoise-gd")
@_graph_options
@_denoise_options
@click.option("--lr", type=float, default=config.LEARNING_RATE, show_default=True)
@click.option("--epochs", type=click.IntRange(min=1), default=config.EPOCHS, show_default=True)
@click.option("--theta0", type=float, default=0.0, show_default=True)
@click.option("--alpha0", type=float, default=1.0, show_default=True)
@click.option("--kappa0", type=float, default=1.0, show_default=True)
@click.option("--trace", "trace_path", default=None, help="Grava a trajetória (loss,best,theta,alpha,kappa).")
@click.pass_context
@_domain_errors
def cmd_denoise_gd(ctx, graph_path, n, gso_kind, axis, family, noisy_path, clean_path, kind, out,
                   lr, epochs, theta0, alpha0, kappa0, trace_path):
    """Descida de gradiente conjunta em h e (θ, α, κ); devolve o melhor ponto visto."""
    spec = _spectrum(graph_path, n, gso_kind)
    y, x = load_signal_csv(noisy_path), load_signal_csv(clean_path)
    params = {"kind": kind, "axis": axis, "family": family, "lr": lr, "epochs": epochs}
    with _journal(ctx, "denoise-gd", params) as journal:
        res = gradient_descent(spec, kind, axis, family, y, x, init=(None, theta0, alpha0, kappa0),
                               lr=lr, epochs=epochs)
        if journal:
            journal("CELL_DONE", {"kind": res.kind.value, "mse": res.mse, "epochs": len(res.trace)})
            journal.linhas = 1
    _report(res, out)
    if trace_path:
        lines = ["loss,best_loss,theta,alpha,kappa"]
        lines += [",".join(f"{v:.17g}" for v in entry) for entry in res.trace]
        _write_lines("\n".join(lines) + "\n", trace_path)


# ==========================
# timeseries / image / pointcloud
# ==========================
def _experiment_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="Arquivo chave=valor; flags explícitas têm precedência."),
        click.option("--in", "input", type=click.Path(), default=None,
                     help="Arquivo de entrada (sem ele usa a fixture sintética)."),
        click.option("--methods", default="gfrft,agft,agfrft-i,agfrft-ii", show_default=True,
                     help="Lista tipo[:eixo[:família]]; sem eixo expande para roll, pitch e yaw."),
        click.option("--family", type=FAMILIES, default="df", show_default=True),
        click.option("--sigma", "sigmas", default=None,
                     help="Lista de σ (default do pipeline: 0.5,1,1.5 | 20,30,40 | 20,30,40)."),
        click.option("--k", "knn_k", type=click.IntRange(min=1), default=config.KNN_K, show_default=True),
        click.option("--gso", "gso_kind", type=GSOS, default="laplacian", show_default=True),
        click.option("--optimizer", type=click.Choice(["grid", "gd"]), default="grid", show_default=True),
        click.option("--theta-step", type=float, default=config.THETA_STEP, show_default=True),
        click.option("--alpha-step", type=float, default=config.ALPHA_STEP, show_default=True),
        click.option("--kappa", type=float, default=1.0, show_default=True),
        click.option("--lr", type=float, default=config.LEARNING_RATE, show_default=True),
        click.option("--epochs", type=click.IntRange(min=1), default=config.EPOCHS, show_default=True),
        click.option("--seed", type=int, default=config.SEED, show_default=True),
        click.option("--threads", type=click.IntRange(min=1), default=config.THREADS, show_default=True),
        click.option("--out", default="results.csv", show_default=True, help="CSV de resultados ('-' = stdout)."),
    ]):
        fn = opt(fn)
    return fn


def _merge_config(ctx: click.Context, pipeline: str, params: dict) -> tuple[ExperimentConfig, str]:
    """default < arquivo < flag explícita."""
    merged: dict[str, object] = {}
    config_path = params.pop("config_path", None)
    if config_path:
        merged.update(canonical_keys(config.load_config_file(config_path)))
    for name, value in params.items():
        if value is None:
            continue
        explicit = ctx.get_parameter_source(name) not in (ParameterSource.DEFAULT, None)
        if explicit or name not in merged:
            merged[name] = value
    out = str(merged.pop("out", "results.csv"))
    merged["pipeline"] = pipeline
    return ExperimentConfig.from_mapping(merged), out


def _summary(rows: list[ResultRow]):
    click.echo(f"{'method':<10} {'axis':<6} {'family':<20} {'sigma':>7} {'segment':>10} "
               f"{'alpha':>6} {'theta':>7} {'mse':>11} {'psnr':>8}")
    for r in best_axis_rows(rows):
        psnr = "inf" if math.isinf(r.psnr) else f"{r.psnr:.3f}"
        click.echo(f"{r.method:<10} {r.axis:<6} {r.family:<20} {r.sigma:>7.4g} {r.segment:>10} "
                   f"{r.alpha:>6.3f} {r.theta:>7.3f} {r.mse:>11.4e} {psnr:>8}")


def _run_pipeline(ctx: click.Context, pipeline: str, params: dict):
    cfg, out = _merge_config(ctx, pipeline, params)
    journal_params = {"pipeline": pipeline, "input": cfg.input, "optimizer": cfg.optimizer,
                      "sigmas": list(cfg.noise_sigmas), "seed": cfg.seed}
    with _journal(ctx, pipeline, journal_params) as journal:
        rows = run_experiment(cfg, on_event=journal)
        if journal:
            journal.linhas = len(rows)
    text = format_results_csv(rows)
    if out == "-":
        click.echo(text, nl=False)
        return
    _write_lines(text, out)
    _summary(rows)
    click.echo(f"{len(rows)} linhas gravadas em {out}")


@cli.command("timeseries")
@_experiment_options
@click.option("--t", "checkpoints", default="100,200,300", show_default=True,
              help="Checkpoints (comprimentos do prefixo da série).")
@click.pass_context
@_domain_errors
def cmd_timeseries(ctx, **params):
    """Séries temporais: grafo de sequência k-NN por checkpoint."""
    _run_pipeline(ctx, "timeseries", params)


@cli.command("image")
@_experiment_options
@click.pass_context
@_domain_errors
def cmd_image(ctx, **params):
    """Imagem em tons de cinza: blocos 8×8 sobre grafo 4-NN de pixels."""
    _run_pipeline(ctx, "image", params)


@cli.command("pointcloud")
@_experiment_options
@click.option("--max-patch", type=click.IntRange(min=1), default=config.MAX_PATCH, show_default=True)
@click.option("--patch-k", type=click.IntRange(min=1), default=config.PATCH_K, show_default=True)
@click.pass_context
@_domain_errors
def cmd_pointcloud(ctx, **params):
    """Nuvem de pontos: patches por mediana, grafo 10-NN gaussiano, x/y/z como sinais."""
    _run_pipeline(ctx, "pointcloud", params)


# ==========================
# check-properties
# ==========================
@cli.command("check-properties")
@click.option("--n", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.pass_context
@_domain_errors
def cmd_check_properties(ctx, n, seed, tol):
    """Roda a bateria de propriedades num GSO aleatório de tamanho n."""
    report = check_properties(n, seed, tol)
    for line in report.lines():
        click.echo(line)
    click.echo("OK" if report.ok else "FALHOU")
    if not report.ok:
        ctx.exit(1)


def main(argv: list[str] | None = None):
    cli.main(args=argv, prog_name="gspec")


if __name__ == "__main__":
    main(sys.argv[1:])
