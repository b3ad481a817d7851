"""Seeded generation of decoding instances y = A f + e.

A is a tall Gaussian coding matrix, f the message, and e a sparse error
vector built under one of two regimes: arbitrary sparse (random support and
signs) or fixed support with fixed signs.  Everything is drawn from a
value-owned Philox stream, so a (master_seed, stream_id) pair fully
determines an instance; the draw order inside :func:`make_instance` is
frozen (matrix, message, support, magnitudes, signs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .seeding import generator_from

# Guard against 0.29*100 = 28.999999999999996-style float droop in k = floor(rho*m).
_FLOOR_GUARD = 1e-9


def floor_count(rho: float, m: int) -> int:
    """floor(rho * m) with a guard for inexact float products."""
    return int(math.floor(rho * m + _FLOOR_GUARD))


def ceil_count(rho: float, m: int) -> int:
    """ceil(rho * m) with the same guard (used by the adversarial constructions)."""
    return int(math.ceil(rho * m - _FLOOR_GUARD))


@dataclass(frozen=True)
class SeedSpec:
    """A (master_seed, stream_id) pair naming one independent random stream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.stream_id < 0:
            raise DomainError(f"stream_id must be non-negative, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        return generator_from(self.master_seed, self.stream_id)


@dataclass(frozen=True, eq=False)
class ErrorSpec:
    """How the error vector is built.

    ``magnitude_law`` is one of ``gaussian`` (|N(0,1)| magnitudes),
    ``constant`` (fixed magnitude ``constant``) or ``from_direction``
    (e_i = (A z)_i on the support, with z = ``direction``).  ``sign_policy``
    is ``random`` or ``fixed``; a fixed policy supplies ``fixed_signs``,
    a map index -> +-1 whose keys are also the support.  ``from_direction``
    determines its own signs and therefore rejects a fixed policy.
    """

    rho: float
    magnitude_law: str = "gaussian"
    constant: float | None = None
    direction: np.ndarray | None = None
    sign_policy: str = "random"
    fixed_signs: dict[int, int] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.rho) and 0 <= self.rho < 1):
            raise DomainError(f"rho must lie in [0, 1), got {self.rho}")
        if self.magnitude_law not in ("gaussian", "constant", "from_direction"):
            raise DomainError(f"unknown magnitude_law {self.magnitude_law!r}")
        if self.magnitude_law == "constant":
            if self.constant is None or not (math.isfinite(self.constant) and self.constant > 0):
                raise DomainError("constant magnitude law needs a positive 'constant'")
        if self.magnitude_law == "from_direction":
            if self.direction is None:
                raise DomainError("from_direction magnitude law needs a 'direction' vector")
            if self.sign_policy == "fixed":
                raise DomainError("from_direction determines signs; fixed sign_policy conflicts")
        if self.sign_policy not in ("random", "fixed"):
            raise DomainError(f"unknown sign_policy {self.sign_policy!r}")
        if self.sign_policy == "fixed":
            if not self.fixed_signs:
                raise DomainError("fixed sign_policy needs a non-empty fixed_signs map")
            if any(s not in (-1, 1) for s in self.fixed_signs.values()):
                raise DomainError("fixed_signs values must be +1 or -1")


@dataclass(eq=False)
class Instance:
    """One decoding problem; y = a @ f + e holds exactly by construction."""

    a: np.ndarray
    f: np.ndarray
    e: np.ndarray
    y: np.ndarray
    support: np.ndarray
    signs: dict[int, int] = field(default_factory=dict)
    seed: SeedSpec | None = None

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def validate(self) -> None:
        """Raise if any construction invariant is broken."""
        m = self.m
        resid = self.y - self.a @ self.f - self.e
        scale = max(1.0, float(np.max(np.abs(self.y))) if m else 1.0)
        if np.max(np.abs(resid), initial=0.0) > 64 * np.finfo(float).eps * scale:
            raise DomainError("instance violates y = a f + e at working precision")
        off = np.setdiff1d(np.arange(m), self.support)
        if np.any(self.e[off] != 0):
            raise DomainError("error vector has mass off its declared support")
        if sorted(self.signs) != list(self.support):
            raise DomainError("sign map keys do not match the support")
        for i in self.support:
            if self.e[i] != 0 and int(np.sign(self.e[i])) != self.signs[int(i)]:
                raise DomainError(f"sign map disagrees with e at index {i}")


def gaussian_matrix(m: int, n: int, seed: SeedSpec) -> np.ndarray:
    """m x n matrix of i.i.d. N(0,1) entries from the seeded stream (m >= n)."""
    if n < 1 or m < n:
        raise DomainError(f"coding model requires m >= n >= 1, got m={m}, n={n}")
    return seed.generator().standard_normal((m, n))


def make_instance(
    m: int,
    n: int,
    spec: ErrorSpec,
    seed: SeedSpec,
    f_mode: str = "gaussian",
) -> Instance:
    """Draw a full instance under ``spec`` from the stream owned by ``seed``.

    ``f_mode='zero'`` replaces the message with zeros after drawing it, so
    the matrix, support and error are identical to the ``gaussian`` instance
    with the same seed; success conditions must not notice the difference.
    """
    if n < 1 or m < n:
        raise DomainError(f"coding model requires m >= n >= 1, got m={m}, n={n}")
    if f_mode not in ("gaussian", "zero"):
        raise DomainError(f"unknown f_mode {f_mode!r}")

    gen = seed.generator()
    a = gen.standard_normal((m, n))
    f = gen.standard_normal(n)
    if f_mode == "zero":
        f = np.zeros(n)

    if spec.sign_policy == "fixed":
        support = np.array(sorted(spec.fixed_signs), dtype=np.int64)
        if support.size and (support[0] < 0 or support[-1] >= m):
            raise DomainError("fixed_signs indices out of range")
    else:
        k = floor_count(spec.rho, m)
        support = np.sort(gen.choice(m, size=k, replace=False)).astype(np.int64)
    k = support.size

    e = np.zeros(m)
    if spec.magnitude_law == "from_direction":
        z = np.asarray(spec.direction, dtype=float)
        if z.shape != (n,):
            raise DomainError(f"direction must have length n={n}, got shape {z.shape}")
        az = a @ z
        e[support] = az[support]
        signs = {int(i): (int(np.sign(e[i])) if e[i] != 0 else 1) for i in support}
    else:
        if spec.magnitude_law == "gaussian":
            mags = np.abs(gen.standard_normal(k))
        else:
            mags = np.full(k, spec.constant)
        if spec.sign_policy == "fixed":
            sgn = np.array([spec.fixed_signs[int(i)] for i in support], dtype=float)
        else:
            sgn = 2.0 * gen.integers(0, 2, size=k) - 1.0
        e[support] = sgn * mags
        signs = {int(i): int(s) for i, s in zip(support, sgn)}

    y = a @ f + e
    return Instance(a=a, f=f, e=e, y=y, support=support, signs=signs, seed=seed)


def apply_decoder_success(x_hat: np.ndarray, f: np.ndarray, tol: float = 1e-4) -> bool:
    """Recovery flag: max_i |x_hat_i - f_i| <= tol.

    The 1e-4 default separates the IRLS convergence floor on noiseless
    supports from genuine failures.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    f = np.asarray(f, dtype=float)
    if x_hat.shape != f.shape:
        raise DomainError(f"shape mismatch: {x_hat.shape} vs {f.shape}")
    return bool(np.max(np.abs(x_hat - f), initial=0.0) <= tol)


# -- Regression-fixture I/O: matrix CSV plus JSON sidecar --


def write_instance(inst: Instance, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` (the matrix, 17 significant digits) and
    ``<prefix>.json`` (f, e, y, support, signs, seed)."""
    prefix = Path(prefix)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")

    rows = [",".join(f"{v:.17g}" for v in row) for row in inst.a]
    csv_path.write_text("\n".join(rows) + "\n")

    sidecar = {
        "m": inst.m,
        "n": inst.n,
        "f": [float(v) for v in inst.f],
        "e": [float(v) for v in inst.e],
        "y": [float(v) for v in inst.y],
        "support": [int(i) for i in inst.support],
        "signs": {str(i): s for i, s in sorted(inst.signs.items())},
        "seed": None
        if inst.seed is None
        else {"master_seed": inst.seed.master_seed, "stream_id": inst.seed.stream_id},
    }
    json_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    return csv_path, json_path


def read_instance(prefix: str | Path) -> Instance:
    """Read an instance written by :func:`write_instance` and validate it."""
    prefix = Path(prefix)
    rows = [
        [float(v) for v in line.split(",")]
        for line in prefix.with_suffix(".csv").read_text().splitlines()
        if line
    ]
    a = np.array(rows, dtype=float)
    sidecar = json.loads(prefix.with_suffix(".json").read_text())
    if a.shape != (sidecar["m"], sidecar["n"]):
        raise DomainError(
            f"matrix shape {a.shape} disagrees with sidecar ({sidecar['m']}, {sidecar['n']})"
        )
    seed = None
    if sidecar.get("seed") is not None:
        seed = SeedSpec(sidecar["seed"]["master_seed"], sidecar["seed"]["stream_id"])
    inst = Instance(
        a=a,
        f=np.array(sidecar["f"], dtype=float),
        e=np.array(sidecar["e"], dtype=float),
        y=np.array(sidecar["y"], dtype=float),
        support=np.array(sidecar["support"], dtype=np.int64),
        signs={int(i): int(s) for i, s in sidecar["signs"].items()},
        seed=seed,
    )
    inst.validate()
    return inst
