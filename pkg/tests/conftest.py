import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import instgen  # noqa: E402

from keyopt.problems import (  # noqa: E402
    HubTreeDecoder,
    PartitionDecoder,
    PMedianDecoder,
    SetCoverDecoder,
    TspDecoder,
)


@pytest.fixture(scope="session")
def tiny_decoders():
    """One small decoder per shipped problem, for operator-level suites."""
    rng = np.random.default_rng(20240817)
    return {
        "tsp": TspDecoder(instgen.tiny_tsp(rng, n=6)),
        "setcover": SetCoverDecoder(instgen.tiny_setcover(rng, m=6, n=8)),
        "pmedian": PMedianDecoder(instgen.tiny_pmedian(rng, n=10, p=4, alpha=2)),
        "partition": PartitionDecoder(instgen.tiny_partition(rng, b=6, r=2)),
        "hubtree": HubTreeDecoder(instgen.tiny_hubtree(rng, n=5, p=3)),
    }
