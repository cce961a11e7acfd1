import numpy as np
import pytest

from polarfb.channels import bec
from polarfb.construction import reliability_profile, select_frozen_set


@pytest.fixture(autouse=True)
def _hermetic_cache(tmp_path_factory, monkeypatch):
    """Keep construction caches inside the test session's tmp tree."""
    cache = tmp_path_factory.getbasetemp() / "profile-cache"
    monkeypatch.setenv("POLARFB_CACHE_DIR", str(cache))
    return cache


def bec_config(N, p=0.5, threshold=None):
    """Convenience: exact-profile BEC code at the given threshold."""
    profile = reliability_profile(bec(p), N)
    if threshold is None:
        threshold = 1.0 / np.log2(N)
    return select_frozen_set(profile, threshold)
