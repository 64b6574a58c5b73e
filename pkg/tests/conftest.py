"""Test configuration and fixtures for ainfdiag tests."""

import os
import sys
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest

# Ensure local src/ is importable without installing the package
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from ainfdiag.ainf_core import madsen_algebra, tensor_structure  # noqa: E402
from ainfdiag.config import RunConfig  # noqa: E402


@pytest.fixture
def temp_dir():
    """Provide a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def run_config():
    """Provide a default run configuration."""
    return RunConfig()


@pytest.fixture
def config_file(temp_dir, run_config):
    """Create a temporary config file."""
    config_path = temp_dir / "run.yaml"
    run_config.with_overrides(n=5, ycap=4).save(config_path)
    yield config_path


@pytest.fixture(scope="session")
def c4():
    """H*(C_4) over F_2."""
    return madsen_algebra(4, 2, ycap=6)


@pytest.fixture(scope="session")
def c4c4():
    """H*(C_4 × C_4) over F_2 up to arity 6."""
    factor = madsen_algebra(4, 2, ycap=6)
    return tensor_structure(factor, factor, max_arity=6)


@pytest.fixture
def clean_env():
    """Run without any AINFDIAG_* variables."""
    kept = {k: v for k, v in os.environ.items() if not k.startswith("AINFDIAG_")}
    with patch.dict(os.environ, kept, clear=True):
        yield
