from __future__ import annotations

import pytest


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep every test away from the user's real cache and external store."""
    path = tmp_path / "cache" / "bounds.jsonl"
    monkeypatch.setenv("COVERBOUND_CACHE", str(path))
    return path
