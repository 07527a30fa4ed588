import math
from typing import Iterable, Optional

import numpy as np
from pydantic import Field, field_validator, model_validator
from typing_extensions import Self

from src.schema.base import BaseSchema


class Atom(BaseSchema):
    """A weighted point: the mass sits at re + i·im"""
    re: float = Field(allow_inf_nan=False)
    im: float = Field(allow_inf_nan=False)
    mass: float = Field(ge=0, allow_inf_nan=False)

    @property
    def location(self) -> complex:
        return complex(self.re, self.im)


class AtomicMeasure(BaseSchema):
    """Finite positive measure given as a list of atoms.

    Zero-mass atoms are dropped at construction. Locations need not be distinct;
    `measure_core.canonicalize` merges bitwise-equal locations.
    """
    atoms: tuple[Atom, ...] = ()

    @field_validator("atoms", mode="after")
    @classmethod
    def drop_zero_mass(cls, atoms: tuple[Atom, ...]) -> tuple[Atom, ...]:
        return tuple(a for a in atoms if a.mass > 0)

    # construction helpers

    @classmethod
    def dirac(cls, z: complex, mass: float = 1.0) -> "AtomicMeasure":
        z = complex(z)
        return cls(atoms=(Atom(re=z.real, im=z.imag, mass=mass),))

    @classmethod
    def from_arrays(cls, locations: Iterable[complex], masses: Iterable[float]) -> "AtomicMeasure":
        locs = np.asarray(list(locations), dtype=complex).ravel()
        ms = np.asarray(list(masses), dtype=float).ravel()
        if locs.shape != ms.shape:
            raise ValueError(f"{locs.size} locations but {ms.size} masses")
        return cls(atoms=tuple(
            Atom(re=float(z.real), im=float(z.imag), mass=float(m)) for z, m in zip(locs, ms)
        ))

    @classmethod
    def empty(cls) -> "AtomicMeasure":
        return cls(atoms=())

    # views

    @property
    def locations(self) -> np.ndarray:
        return np.array([a.location for a in self.atoms], dtype=complex)

    @property
    def masses(self) -> np.ndarray:
        return np.array([a.mass for a in self.atoms], dtype=float)

    @property
    def total_mass(self) -> float:
        return math.fsum(a.mass for a in self.atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def support_radius(self, center: complex = 0j) -> float:
        """Largest |location − center| over the atoms (0 for the empty measure)"""
        if self.is_empty:
            return 0.0
        return float(np.max(np.abs(self.locations - complex(center))))

    # algebra

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure(atoms=self.atoms + other.atoms)

    def scaled(self, factor: float) -> "AtomicMeasure":
        """Multiply every mass by a nonnegative factor"""
        if factor < 0:
            raise ValueError("mass scaling factor must be nonnegative")
        return AtomicMeasure(atoms=tuple(
            Atom(re=a.re, im=a.im, mass=a.mass * factor) for a in self.atoms
        ))

    def dilated(self, s: complex) -> "AtomicMeasure":
        """Push forward under z ↦ s·z (complex s rotates as well)"""
        return AtomicMeasure.from_arrays(self.locations * complex(s), self.masses)

    def translated(self, c: complex) -> "AtomicMeasure":
        return AtomicMeasure.from_arrays(self.locations + complex(c), self.masses)


class SignedMeasure(BaseSchema):
    """A charge given as a Jordan pair (plus, minus) of atomic measures.

    Construction does not cancel anything; `canonicalize` does.
    """
    plus: AtomicMeasure = Field(default_factory=AtomicMeasure)
    minus: AtomicMeasure = Field(default_factory=AtomicMeasure)

    @classmethod
    def positive(cls, m: AtomicMeasure) -> "SignedMeasure":
        return cls(plus=m, minus=AtomicMeasure())

    @classmethod
    def from_difference(cls, omega: AtomicMeasure, delta: AtomicMeasure) -> "SignedMeasure":
        """The charge ω − δ, uncancelled"""
        return cls(plus=omega, minus=delta)

    @property
    def total_variation(self) -> AtomicMeasure:
        return self.plus + self.minus

    @property
    def net_mass(self) -> float:
        return self.plus.total_mass - self.minus.total_mass

    def signed_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Locations and signed masses (plus first, then minus with negative sign)"""
        locs = np.concatenate([self.plus.locations, self.minus.locations])
        ms = np.concatenate([self.plus.masses, -self.minus.masses])
        return locs, ms


class RadialProfile(BaseSchema):
    """ν^rad sampled on an increasing radii grid (closed disks around 0)"""
    grid: tuple[float, ...]
    values: tuple[float, ...]

    @model_validator(mode="after")
    def check_shape(self) -> Self:
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have the same length")
        if any(r < 0 for r in self.grid):
            raise ValueError("radii must be nonnegative")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("radii grid must be strictly increasing")
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("cumulative masses must be nondecreasing")
        return self

    def at(self, r: float) -> float:
        """Right-continuous step value at r (0 before the first grid radius)"""
        idx = int(np.searchsorted(np.asarray(self.grid), r, side="right")) - 1
        return 0.0 if idx < 0 else self.values[idx]


class TailWeight(BaseSchema):
    """Weight t ↦ t^power · (ln t)^(1 if log else 0) for the tail functional"""
    power: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    log: bool = False

    @property
    def label(self) -> str:
        base = f"t^{self.power:g}"
        return f"{base}·ln t" if self.log else base


def tail_weight_for_order(p: float, power: Optional[float] = None) -> TailWeight:
    """Integrability weight for order p: t^p · ln^{1+⌊p⌋−⌈p⌉} t.

    The log factor appears exactly when p is an integer.
    """
    if p < 0 or not math.isfinite(p):
        raise ValueError("order p must be a finite nonnegative real")
    integral = math.floor(p) == math.ceil(p)
    return TailWeight(power=p if power is None else power, log=integral)
