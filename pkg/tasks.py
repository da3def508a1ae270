"""tasks.py - automação local do gspec.

  python tasks.py api             -> sobe a API JSON (Flask, porta 5000)
  python tasks.py test [-k expr]  -> pytest (-q quando sem argumentos)
  python tasks.py check [n ...]   -> bateria de propriedades (default n=8 e n=16)
  python tasks.py demo [pasta]    -> os três pipelines nas fixtures sintéticas
  python tasks.py lint            -> compileall em todo o código ativo
  python tasks.py clean           -> apaga gspec.db, results*.csv e __pycache__
  python tasks.py ci              -> lint + test + check; para no primeiro erro
"""
from __future__ import annotations

import os
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).parent
PY = sys.executable
CLI = [PY, 'cli.py']


def _sh(cmd: list[str], env: dict | None = None) -> None:
    print('$', ' '.join(cmd))
    code = subprocess.call(cmd, cwd=ROOT, env={**os.environ, **(env or {})})
    if code:
        sys.exit(code)


def api(args):
    _sh([PY, 'app.py'], env={'FLASK_DEBUG': '1'})


def test(args):
    _sh([PY, '-m', 'pytest', *(args or ['-q'])])


def check(args):
    for n in args or ('8', '16'):
        _sh(CLI + ['check-properties', '--n', n])


def demo(args):
    out = ROOT / (args[0] if args else 'demo_out')
    out.mkdir(exist_ok=True)
    # grades grossas para a demo caber em poucos segundos
    fast = ['--theta-step', '1.2566', '--alpha-step', '0.25']
    for pipeline in ('timeseries', 'image', 'pointcloud'):
        _sh(CLI + [pipeline, *fast, '--out', str(out / f'results_{pipeline}.csv')])


def lint(args):
    _sh([PY, '-m', 'compileall', '-q', '-x', r'(examples|tests/data|demo_out)', '.'])


def clean(args):
    for p in [ROOT / 'gspec.db', *ROOT.glob('results*.csv'), ROOT / 'demo_out']:
        if p.is_dir():
            shutil.rmtree(p)
        elif p.exists():
            p.unlink()
    for cache in ROOT.rglob('__pycache__'):
        if 'examples' not in cache.parts:
            shutil.rmtree(cache, ignore_errors=True)


def ci(args):
    lint([])
    test(['-q'])
    check([])


TASKS = {fn.__name__: fn for fn in (api, test, check, demo, lint, clean, ci)}


if __name__ == '__main__':
    name, *rest = sys.argv[1:] or ['']
    if name not in TASKS:
        print(__doc__)
        sys.exit(1 if not name else 2)
    TASKS[name](rest)
