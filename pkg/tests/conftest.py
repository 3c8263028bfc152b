import sys
from functools import lru_cache

import numpy as np
import pytest

from quasitopy import catalog
from quasitopy.assembly import random_curve
from quasitopy.errors import QscError
from quasitopy.surface import Alignment, Gluing, SideRef, SurfaceComplex, validate_complex


def random_complex(seed: int, orientable_only: bool = False) -> SurfaceComplex:
    """Random polygons with a random partial side pairing; rejects pinched vertices."""
    rng = np.random.default_rng(seed)
    while True:
        nf = int(rng.integers(1, 4))
        faces = tuple((f"F{i}", int(rng.integers(1, 7))) for i in range(nf))
        sides = [SideRef(f, s) for f, k in faces for s in range(k)]
        order = rng.permutation(len(sides))
        n_pairs = int(rng.integers(0, len(sides) // 2 + 1))
        gluings = []
        for j in range(n_pairs):
            a, b = sides[order[2 * j]], sides[order[2 * j + 1]]
            twisted = (not orientable_only) and rng.random() < 0.3
            gluings.append(Gluing(f"g{j}", a, b, Alignment.TWISTED if twisted else Alignment.COMPATIBLE))
        c = SurfaceComplex(faces, tuple(gluings))
        try:
            s = validate_complex(c)
        except QscError:
            continue
        if orientable_only and not s.orientable:
            continue
        return c


@pytest.fixture(params=sorted(catalog.CORPUS))
def corpus_complex(request):
    return request.param, catalog.CORPUS[request.param]()


SEEDED_COMPLEXES = ["torus", "genus2", "pants", "torus2", "cylinder2", "annulus"]


@lru_cache(maxsize=None)
def seeded_curve(seed: int, kinks: int = 1):
    c = catalog.CORPUS[SEEDED_COMPLEXES[seed % len(SEEDED_COMPLEXES)]]()
    return random_curve(c, seed, 2, 1 + seed % 2, kinks * (seed % 3))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
