from pathlib import Path

import pytest

from snsim.model import SimConfig, load_config

REPO_ROOT = Path(__file__).resolve().parents[1]
BASELINE_CONFIG_PATH = REPO_ROOT / "configs" / "baseline.toml"


def dirs_equal(a: Path, b: Path) -> bool:
    """Recursive byte comparison of two output directories."""
    files_a = {p.relative_to(a): p for p in a.rglob("*") if p.is_file()}
    files_b = {p.relative_to(b): p for p in b.rglob("*") if p.is_file()}
    if files_a.keys() != files_b.keys():
        return False
    return all(files_a[rel].read_bytes() == files_b[rel].read_bytes()
               for rel in files_a)


def tiny_config(**overrides) -> SimConfig:
    """A fast configuration that still exercises shares and cascades."""
    base = dict(
        n_major=3,
        n_minor=30,
        n_steps=5,
        l_threshold=2.5,
        a_threshold=0.05,
        p_alt=1.0,
        altruism_enabled=True,
        view_probability=0.4,
        seed=7,
    )
    base.update(overrides)
    return SimConfig(**base)


@pytest.fixture
def tiny():
    return tiny_config()


@pytest.fixture(scope="session")
def baseline_config() -> SimConfig:
    return load_config(BASELINE_CONFIG_PATH)
