"""Shared fixtures.

The banknote-dependent tests need the real dataset file, which is not
vendored. Point BANKNOTE_CSV at a local copy (or place it at data/banknote.csv
under the repository root); without it those tests are skipped with an
explicit reason.
"""

import os
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_BANKNOTE = REPO_ROOT / "data" / "banknote.csv"


def banknote_csv_path():
    env = os.environ.get("BANKNOTE_CSV")
    if env:
        path = Path(env)
        if path.exists():
            return path
    if DEFAULT_BANKNOTE.exists():
        return DEFAULT_BANKNOTE
    return None


@pytest.fixture(scope="session")
def banknote_records():
    path = banknote_csv_path()
    if path is None:
        pytest.skip(
            "banknote dataset unavailable (offline environment); "
            "set BANKNOTE_CSV or place the file at data/banknote.csv"
        )
    from prevalence_mle.dataset import load_banknote

    return load_banknote(path)
