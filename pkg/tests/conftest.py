import functools
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from centralam.chartab import character_table  # noqa: E402
from centralam.groups import make_group  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parent.parent
PACK_DIR = ROOT / "fixture_pack"


@functools.lru_cache(maxsize=None)
def table(spec: str):
    return character_table(make_group(spec))


@pytest.fixture
def tbl():
    return table
