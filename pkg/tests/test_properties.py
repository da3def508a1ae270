import pytest

from errors import DimensionError
from properties import EXPECTED_FAIL, FAIL, PASS, SKIP, check_properties


def _status(report):
  return {c.name: c.status for c in report.checks}


def test_battery_passes_at_n8():
  rep = check_properties(8)
  status = _status(rep)
  assert rep.ok, rep.lines()
  assert FAIL not in status.values()
  assert status["legacy_rotation(θ=0) = I"] == EXPECTED_FAIL
  assert status["df_rotation(θ=0) = I exato"] == PASS
  assert status["eixos distintos (θ=0.3)"] == PASS
  assert status["aditividade tipo I"] == PASS


@pytest.mark.parametrize("n", [1, 2, 3, 5, 16])
def test_battery_other_sizes(n):
  rep = check_properties(n, seed=3)
  assert rep.ok, rep.lines()


def test_small_sizes_skip_what_does_not_apply():
  status = _status(check_properties(1))
  assert status["expm_skew: ortogonal com det 1"] == SKIP
  assert status["legacy_rotation(θ=0) = I"] == SKIP
  assert status["eixos distintos (θ=0.3)"] == SKIP


def test_report_serialization():
  rep = check_properties(4, seed=1)
  d = rep.to_dict()
  assert d["n"] == 4 and d["seed"] == 1 and d["ok"] is True
  assert len(d["checks"]) == len(rep.lines())
  assert {"name", "status", "detail"} <= set(d["checks"][0])


def test_rejects_invalid_size():
  with pytest.raises(DimensionError):
    check_properties(0)


def test_wiener_lines_separate_spectral_and_real_loss():
  rep = check_properties(8, seed=2)
  status = _status(rep)
  assert status["Wiener: ótimo por coordenada (objetivo espectral)"] == PASS
  assert status["Wiener: ótimo na perda real (GFT/AGFT)"] == PASS
  frac = next(c for c in rep.checks if c.name == "Wiener: distância à perda real ótima (tipos fracionários)")
  assert frac.status == PASS and float(frac.detail) >= 0.0
