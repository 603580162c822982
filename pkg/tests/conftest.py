import os
import urllib.error
import urllib.request
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent

WINE_WHITE_ENV = "BITMEDIAN_WINE_WHITE"
WINE_WHITE_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "wine-quality/winequality-white.csv"
)


@pytest.fixture(scope="session")
def wine_excerpt_path() -> Path:
    return TESTS_DIR / "data" / "wine_excerpt.csv"


@pytest.fixture(scope="session")
def wine_white_path() -> Path:
    """Path to the UCI white wine-quality file.

    Resolution order: $BITMEDIAN_WINE_WHITE, data/winequality-white.csv in
    the repo, then a one-time download attempt (cached under data/).  Tests
    depending on this fixture skip when the file cannot be obtained, e.g. in
    offline environments; run scripts/fetch_wine.py (or set the env var) to
    enable them.
    """
    env = os.environ.get(WINE_WHITE_ENV)
    if env:
        p = Path(env)
        if p.exists():
            return p
    cached = REPO_ROOT / "data" / "winequality-white.csv"
    if cached.exists():
        return cached
    try:
        cached.parent.mkdir(parents=True, exist_ok=True)
        with urllib.request.urlopen(WINE_WHITE_URL, timeout=15) as resp:
            body = resp.read()
        cached.write_bytes(body)
        return cached
    except (urllib.error.URLError, OSError) as exc:
        pytest.skip(
            "UCI winequality-white.csv unavailable (offline?): "
            f"{exc}; run scripts/fetch_wine.py or set ${WINE_WHITE_ENV}"
        )
