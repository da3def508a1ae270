"""db.py

Diário de execuções em SQLite (runs + run_logs).

Notas:
1. Uma linha em `runs` por execução (comando da CLI ou chamada /api/denoise),
   com o comando, os parâmetros em JSON e o status (RUNNING -> OK | ERRO).
2. `run_logs` segue o formato do antigo log de auditoria: `acao` curta em
   maiúsculas + `detalhe_json`. Ações usadas:
       RUN_STARTED, CELL_DONE, IMAG_RESIDUAL, RUN_FINISHED, RUN_FAILED
3. Schema criado com CREATE ... IF NOT EXISTS. O diário nunca influencia os
   CSVs de resultado; é só trilha de auditoria.

Caminho do banco: GSPEC_DB_PATH (default gspec.db), lido na importação.
"""
# db.py
import json
import os
import sqlite3
from contextlib import contextmanager

DB_PATH = os.environ.get("GSPEC_DB_PATH", "gspec.db")


def set_db_path(path: str):
    """Troca o banco em tempo de execução (flag --db da CLI)."""
    global DB_PATH
    DB_PATH = path


def _connect() -> sqlite3.Connection:
    conn = sqlite3.connect(DB_PATH, check_same_thread=False)
    conn.row_factory = sqlite3.Row
    conn.execute("PRAGMA foreign_keys = ON;")
    conn.execute("PRAGMA journal_mode = WAL;")
    conn.execute("PRAGMA synchronous = NORMAL;")
    return conn


@contextmanager
def get_conn():
    conn = _connect()
    try:
        yield conn
        conn.commit()
    finally:
        conn.close()


# ---------- criação “do zero” (idempotente) ----------
def init_db():
    with get_conn() as conn:
        conn.execute("""
        CREATE TABLE IF NOT EXISTS runs (
            id           INTEGER PRIMARY KEY AUTOINCREMENT,
            comando      TEXT NOT NULL,
            params_json  TEXT,
            status       TEXT DEFAULT 'RUNNING',
            linhas       INTEGER DEFAULT 0,
            created_at   DATETIME DEFAULT CURRENT_TIMESTAMP,
            finished_at  DATETIME
        );
        """)
        conn.execute("""
        CREATE TABLE IF NOT EXISTS run_logs (
            id           INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id       INTEGER NOT NULL REFERENCES runs(id) ON DELETE CASCADE,
            acao         TEXT NOT NULL,
            detalhe_json TEXT,
            created_at   DATETIME DEFAULT CURRENT_TIMESTAMP
        );
        """)
        conn.execute("CREATE INDEX IF NOT EXISTS idx_run_logs_run ON run_logs(run_id);")
        conn.execute("CREATE INDEX IF NOT EXISTS idx_runs_status ON runs(status);")


def bootstrap_db():
    """Cria o schema se faltar (idempotente); chamado na subida da API e pela CLI com --db."""
    init_db()
    return True


# ---------- operações do diário ----------
def create_run(comando: str, params: dict | None = None) -> int:
    with get_conn() as conn:
        cur = conn.execute(
            "INSERT INTO runs(comando, params_json) VALUES (?, ?)",
            (comando, json.dumps(params or {}, default=str, sort_keys=True)),
        )
        run_id = cur.lastrowid
        conn.execute(
            "INSERT INTO run_logs(run_id, acao, detalhe_json) VALUES (?,?,?)",
            (run_id, "RUN_STARTED", json.dumps({"comando": comando})),
        )
    return run_id


def log_event(run_id: int, acao: str, detalhe: dict | None = None):
    with get_conn() as conn:
        conn.execute(
            "INSERT INTO run_logs(run_id, acao, detalhe_json) VALUES (?,?,?)",
            (run_id, acao, json.dumps(detalhe or {}, default=str)),
        )


def finish_run(run_id: int, ok: bool = True, linhas: int = 0, erro: str | None = None):
    status = "OK" if ok else "ERRO"
    acao = "RUN_FINISHED" if ok else "RUN_FAILED"
    detalhe = {"linhas": linhas} if ok else {"erro": erro}
    with get_conn() as conn:
        conn.execute(
            "UPDATE runs SET status=?, linhas=?, finished_at=CURRENT_TIMESTAMP WHERE id=?",
            (status, linhas, run_id),
        )
        conn.execute(
            "INSERT INTO run_logs(run_id, acao, detalhe_json) VALUES (?,?,?)",
            (run_id, acao, json.dumps(detalhe)),
        )


def list_runs(limit: int = 50) -> list[dict]:
    with get_conn() as conn:
        rows = conn.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,)).fetchall()
        return [dict(r) for r in rows]


def get_run(run_id: int) -> dict | None:
    with get_conn() as conn:
        row = conn.execute("SELECT * FROM runs WHERE id=?", (run_id,)).fetchone()
        return dict(row) if row else None


def run_logs(run_id: int) -> list[dict]:
    with get_conn() as conn:
        rows = conn.execute("SELECT * FROM run_logs WHERE run_id=? ORDER BY id ASC", (run_id,)).fetchall()
        return [dict(r) for r in rows]


class RunJournal:
    """Contexto que abre um run, repassa eventos e fecha com OK ou ERRO.

    with RunJournal("image", params) as journal:
        rows = run_image(cfg, on_event=journal)
        journal.linhas = len(rows)
    """

    def __init__(self, comando: str, params: dict | None = None):
        self.comando = comando
        self.params = params or {}
        self.run_id: int | None = None
        self.linhas = 0

    def __enter__(self) -> "RunJournal":
        bootstrap_db()
        self.run_id = create_run(self.comando, self.params)
        return self

    def __call__(self, acao: str, detalhe: dict):
        log_event(self.run_id, acao, detalhe)

    def __exit__(self, exc_type, exc, tb):
        if exc is None:
            finish_run(self.run_id, ok=True, linhas=self.linhas)
        else:
            finish_run(self.run_id, ok=False, erro=str(exc))
        return False
