import pytest


@pytest.fixture(autouse=True)
def _no_env_overrides(monkeypatch):
    """Keep ambient cache-dir overrides from leaking into tests."""
    monkeypatch.delenv("CFBENCH_DATA_DIR", raising=False)
    monkeypatch.delenv("CFBENCH_MODEL_DIR", raising=False)
