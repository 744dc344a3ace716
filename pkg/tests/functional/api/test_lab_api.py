import httpx
import pytest
import pytest_asyncio
from fastapi import status

from app.main import app


@pytest_asyncio.fixture
async def client():
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url='http://test') as c:
        yield c


@pytest.fixture
def run_config():
    """Honest five-user run in d = 8."""
    return {'d': 8, 'n': 5, 'L': 3, 'seed': 17, 'p': [4, 0, 4, 2, 3]}


@pytest.mark.functional
@pytest.mark.asyncio
async def test_health(client):
    """Test the health endpoint."""
    response = await client.get('/health')
    assert response.status_code == status.HTTP_200_OK
    assert response.json() == {'status': 'healthy'}


@pytest.mark.functional
@pytest.mark.asyncio
async def test_demo_matches_reference(client):
    """Test that the walkthrough endpoint reproduces the reference values."""
    response = await client.get('/api/v1/protocol/demo')
    assert response.status_code == status.HTTP_200_OK

    report = response.json()
    assert report['matches_reference'] is True
    assert report['announcement'] == 'P4>P1>P2>P3'
    assert report['q'] == 6
    assert report['M'] == [8, 7, 5, 9]


@pytest.mark.functional
@pytest.mark.asyncio
async def test_run_honest(client, run_config):
    """Test an honest run through the API."""
    response = await client.post('/api/v1/protocol/run', json=run_config)
    assert response.status_code == status.HTTP_200_OK

    result = response.json()
    assert result['outcome'] == 'completed'
    assert result['announcement'] == 'P1=P3>P5>P4>P2'
    assert result['aborted'] is None
    assert result['qudit_count'] == 10
    assert result['classical_dit_count'] == 10


@pytest.mark.functional
@pytest.mark.asyncio
async def test_run_under_attack_aborts(client, run_config):
    """Test that an intercept-resend run reports the abort record."""
    run_config['L'] = 20
    run_config['attack'] = 'intercept_resend'
    response = await client.post('/api/v1/protocol/run', json=run_config)
    assert response.status_code == status.HTTP_200_OK

    result = response.json()
    assert result['outcome'] == 'aborted'
    assert result['announcement'] is None
    assert result['aborted']['step'] == 2
    assert result['aborted']['channel'] == 's1'


@pytest.mark.functional
@pytest.mark.asyncio
async def test_run_rejects_out_of_domain_secret(client, run_config):
    """Test that a private integer above h is a validation error."""
    run_config['p'][0] = 5
    response = await client.post('/api/v1/protocol/run', json=run_config)
    assert response.status_code == 422


@pytest.mark.functional
@pytest.mark.asyncio
async def test_run_rejects_unknown_attack(client, run_config):
    """Test that an unknown attack name is a bad request."""
    run_config['attack'] = 'trojan_horse'
    response = await client.post('/api/v1/protocol/run', json=run_config)
    assert response.status_code == status.HTTP_400_BAD_REQUEST


@pytest.mark.functional
@pytest.mark.asyncio
async def test_attack_experiment(client):
    """Test the attack experiment endpoint against the closed form."""
    payload = {'attack': 'intercept_resend', 'd': 3, 'L': 2, 'trials': 5000}
    response = await client.post('/api/v1/security/attack', json=payload)
    assert response.status_code == status.HTTP_200_OK

    result = response.json()
    assert result['model'] == 'intercept_resend'
    assert result['trials'] == 5000
    assert result['theoretical_rate'] == pytest.approx(8 / 9)
    assert abs(result['empirical_rate'] - 8 / 9) < 0.03


@pytest.mark.functional
@pytest.mark.asyncio
async def test_attack_experiment_unknown_model(client):
    """Test that an unknown attack model is a bad request."""
    payload = {'attack': 'trojan_horse', 'd': 3, 'L': 2, 'trials': 10}
    response = await client.post('/api/v1/security/attack', json=payload)
    assert response.status_code == status.HTTP_400_BAD_REQUEST


@pytest.mark.functional
@pytest.mark.asyncio
async def test_audit(client):
    """Test the audit endpoint on canonical attacks."""
    payload = {'d': 2, 'probe_dim': 2, 'samples': 10}
    response = await client.post('/api/v1/security/audit', json=payload)
    assert response.status_code == status.HTTP_200_OK

    report = response.json()
    assert report['identity']['stealthy'] is True
    assert report['controlled_shift']['stealthy'] is False
    assert report['violations'] == 0
    assert [scan['family'] for scan in report['scans']] == ['haar', 'stealth']


@pytest.mark.functional
@pytest.mark.asyncio
async def test_audit_too_large(client):
    """Test that an oversized audit is a bad request."""
    payload = {'d': 40, 'probe_dim': 2}
    response = await client.post('/api/v1/security/audit', json=payload)
    assert response.status_code == status.HTTP_400_BAD_REQUEST


@pytest.mark.functional
@pytest.mark.asyncio
@pytest.mark.parametrize(('n', 'eta'), [(2, '1/8'), (4, '1/16'), (10, '1/40')])
async def test_efficiency(client, n, eta):
    """Test the closed-form efficiency endpoint."""
    response = await client.get(f'/api/v1/metrics/efficiency/{n}')
    assert response.status_code == status.HTTP_200_OK
    assert response.json()['eta'] == eta


@pytest.mark.functional
@pytest.mark.asyncio
async def test_efficiency_rejects_single_user(client):
    """Test that fewer than two users is a bad request."""
    response = await client.get('/api/v1/metrics/efficiency/1')
    assert response.status_code == status.HTTP_400_BAD_REQUEST
