import math

import pytest

W4 = [
  [0.0, 1.0, 0.5, 0.0],
  [1.0, 0.0, 0.7, 0.2],
  [0.5, 0.7, 0.0, 1.3],
  [0.0, 0.2, 1.3, 0.0],
]
CLEAN = [1.0, -2.0, 0.5, 4.0]
NOISY = [1.3, -1.6, 0.2, 4.4]


def test_health(app_client):
  r = app_client.get('/health')
  assert r.status_code == 200 and r.get_json() == {'ok': True}


def test_transform_gft_two_nodes(app_client):
  r = app_client.post('/api/transform', json={'weights': [[0, 1], [1, 0]], 'signal': [1, 1], 'kind': 'gft'})
  assert r.status_code == 200
  body = r.get_json()
  assert body['kind'] == 'gft'
  assert body['re'] == pytest.approx([math.sqrt(2), 0.0], abs=1e-12)
  assert body['im'] == pytest.approx([0.0, 0.0], abs=1e-12)


def test_transform_inverse_round_trip(app_client):
  common = {'edges': [[0, 1, 1.0], [1, 2, 0.5], [2, 3, 2.0]], 'n': 4, 'kind': 'agfrft_ii',
            'theta': 0.9, 'alpha': 0.3, 'axis': 'roll'}
  fwd = app_client.post('/api/transform', json={**common, 'signal': CLEAN, 'concentration': 2}).get_json()
  assert 0.0 < fwd['concentration'] <= 1.0
  back = app_client.post('/api/transform', json={**common, 'inverse': True, 're': fwd['re'], 'im': fwd['im']})
  assert back.status_code == 200
  assert back.get_json()['re'] == pytest.approx(CLEAN, abs=1e-8)


def test_transform_errors_are_400(app_client):
  r = app_client.post('/api/transform', json={'weights': [[0, 1], [0.5, 0]], 'signal': [1, 1]})
  assert r.status_code == 400 and 'error' in r.get_json()
  r = app_client.post('/api/transform', json={'weights': [[0, 1], [1, 0]], 'signal': [1, 1, 1]})
  assert r.status_code == 400
  r = app_client.post('/api/transform', data='nada', content_type='text/plain')
  assert r.status_code == 400
  r = app_client.post('/api/transform', json={'weights': W4, 'signal': CLEAN, 'kind': 'fft'})
  assert r.status_code == 400


def test_denoise_grid_logs_in_order(app_client):
  r = app_client.post('/api/denoise', json={
      'weights': W4, 'noisy': NOISY, 'clean': CLEAN, 'kind': 'agfrft_i', 'axis': 'pitch',
      'theta_grid': [0.0, 1.2566], 'alpha_grid': [0.0, 0.5, 1.0],
  })
  assert r.status_code == 200, r.get_json()
  body = r.get_json()
  assert body['kind'] == 'agfrft_i' and body['axis'] == 'pitch'
  assert body['theta'] in (0.0, 1.2566) and body['alpha'] in (0.0, 0.5, 1.0)
  assert len(body['h']) == 4 and len(body['filtered']) == 4
  assert body['trace_len'] == 0

  logs = app_client.get(f"/api/runs/{body['run_id']}/logs").get_json()
  acoes = [l['acao'] for l in logs]
  assert acoes == ['RUN_STARTED', 'CELL_DONE', 'RUN_FINISHED']

  runs = app_client.get('/api/runs').get_json()
  run = next(x for x in runs if x['id'] == body['run_id'])
  assert run['status'] == 'OK' and run['comando'] == 'api/denoise'


def test_denoise_gd(app_client):
  r = app_client.post('/api/denoise', json={
      'weights': W4, 'noisy': NOISY, 'clean': CLEAN, 'kind': 'gfrft', 'optimizer': 'gd', 'epochs': 3,
  })
  assert r.status_code == 200
  body = r.get_json()
  assert body['trace_len'] == 3 and body['axis'] is None


def test_denoise_bad_optimizer(app_client):
  r = app_client.post('/api/denoise', json={'weights': W4, 'noisy': NOISY, 'clean': CLEAN, 'optimizer': 'adam'})
  assert r.status_code == 400


def test_properties_endpoint(app_client):
  body = app_client.get('/api/properties?n=4').get_json()
  assert body['ok'] is True and body['n'] == 4
  status = {c['name']: c['status'] for c in body['checks']}
  assert status['legacy_rotation(θ=0) = I'] == 'EXPECTED-FAIL'
  assert app_client.get('/api/properties?n=x').status_code == 400


def test_run_logs_404(app_client):
  assert app_client.get('/api/runs/999999/logs').status_code == 404


def test_util_routes(app_client):
  assert '/api/transform' in app_client.get('/__routes__').get_data(as_text=True)
  diag = app_client.get('/__dbdiag__').get_json()
  assert {'runs', 'run_logs'} <= set(diag['tables'])
