import cmath
import math
from pathlib import Path
from typing import Callable

import pytest

from src.database.measure_repository import MeasureRepository
from src.schema.construct import SweepSpec
from src.schema.measure import AtomicMeasure
from src.services.balayage_construct import poisson_sweep

SWEEP_SOURCES = (0.3 + 0j, cmath.rect(0.5, math.pi / 3), -0.7j)


@pytest.fixture(scope="session")
def sweep_pairs() -> list[tuple[AtomicMeasure, AtomicMeasure]]:
    """Dirac sources and their 1024-node Poisson sweeps onto the unit circle"""
    return [
        (AtomicMeasure.dirac(a), poisson_sweep(AtomicMeasure.dirac(a), SweepSpec(radius=1.0, arcs=1024)))
        for a in SWEEP_SOURCES
    ]


@pytest.fixture(scope="session")
def half_sweep() -> tuple[AtomicMeasure, AtomicMeasure]:
    delta = AtomicMeasure.dirac(0.5)
    return delta, poisson_sweep(delta, SweepSpec(radius=1.0, arcs=512))


@pytest.fixture
def write_measure(tmp_path: Path) -> Callable[[str, AtomicMeasure], Path]:
    repo = MeasureRepository()

    def write(name: str, measure: AtomicMeasure) -> Path:
        return repo.save(measure, tmp_path / name)

    return write
