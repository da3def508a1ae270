import os
import tempfile

import numpy as np
import pytest

"""Fixtures de teste.

Notas:
 - O banco do diário é redirecionado para um diretório temporário ANTES de
   qualquer módulo do pacote ser importado (db lê GSPEC_DB_PATH na importação).
   Assim nenhum teste escreve gspec.db na raiz do projeto.
 - app_client tem escopo de sessão: app chama bootstrap_db no import e a mesma
   instância é reaproveitada por todos os testes de API.
 - Fixtures numéricas: o grafo de 4 nós com pesos genéricos (autovalores
   distintos) é o caso base das checagens de transformada; os de 8 nós saem de
   sementes fixas.
"""

_TMPDIR = tempfile.TemporaryDirectory()
os.environ['GSPEC_DB_PATH'] = os.path.join(_TMPDIR.name, 'test.db')

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')

# Laplaciano de grafo ponderado genérico (autovalores distintos)
W4 = np.array([
  [0.0, 1.0, 0.5, 0.0],
  [1.0, 0.0, 0.7, 0.2],
  [0.5, 0.7, 0.0, 1.3],
  [0.0, 0.2, 1.3, 0.0],
])


@pytest.fixture(scope="session")
def app_client():
  import db
  db.set_db_path(os.environ['GSPEC_DB_PATH'])
  import app as app_module  # type: ignore
  client = app_module.app.test_client()
  yield client


@pytest.fixture(scope="session")
def data_dir():
  return DATA_DIR


@pytest.fixture
def lap4():
  return np.diag(W4.sum(axis=1)) - W4


@pytest.fixture
def spec4(lap4):
  from spectral import build_spectrum
  return build_spectrum(lap4)


def random_spectrum(n, seed):
  from graphs import gso, random_weighted_graph
  from spectral import build_spectrum
  rng = np.random.default_rng(seed)
  return build_spectrum(gso(random_weighted_graph(n, rng), "laplacian"))


@pytest.fixture
def spectra8():
  return [random_spectrum(8, seed) for seed in (11, 12)]


@pytest.fixture
def rng():
  return np.random.default_rng(1234)
