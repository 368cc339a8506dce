"""Shared pytest fixtures for cskit tests."""

import numpy as np
import pytest

import cskit.config as config
from cskit.isomaps import random_unit_quaternion


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep user config files, cskit.toml and CSKIT_SEED out of tests.

    The working directory moves to an empty temporary directory.
    """
    monkeypatch.setattr(config, "USER_CONFIG_FILE", tmp_path / "no-user-config" / "config.toml")
    monkeypatch.delenv(config.SEED_ENV, raising=False)
    workdir = tmp_path / "work"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    return workdir


@pytest.fixture
def rng():
    """Seeded numpy Generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def unit_quaternions(rng):
    """A few random unit quaternions.

    Usage:
        def test_something(unit_quaternions):
            p, q, r = unit_quaternions[:3]
    """
    return [random_unit_quaternion(rng) for _ in range(8)]


@pytest.fixture
def project_dir(tmp_path):
    """Directory holding a cskit.toml with seed 7 and 20 trials."""
    root = tmp_path / "project"
    root.mkdir()
    (root / "cskit.toml").write_text('[check]\nseed = 7\ntrials = 20\n\n[tolerances]\ngeodesic = 2e-4\n')
    return root
