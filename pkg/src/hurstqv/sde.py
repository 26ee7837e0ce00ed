"""Milstein simulation of X_t = x0 + int f(X) ds + int g(X) dB^H_s."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SimulationError
from .fbm import fbm_path
from .paths import SamplePath

ScalarFn = Callable[[float], float]


@dataclass(frozen=True)
class ProcessSpec:
    name: str
    drift: ScalarFn
    diffusion: ScalarFn
    diffusion_deriv: ScalarFn
    x0: float = 1.0
    # True when |g| is bounded away from zero, as the known-g estimator needs
    diffusion_bounded_below: bool = False


def _two_plus_cos(x):
    return 2.0 + math.cos(x)


def _minus_sin(x):
    return -math.sin(x)


PROCESSES = {
    "I": ProcessSpec("I", math.sin, math.cos, _minus_sin, x0=1.0),
    "II": ProcessSpec("II", math.sin, _two_plus_cos, _minus_sin, x0=1.0,
                      diffusion_bounded_below=True),
}


def get_process(name: str) -> ProcessSpec:
    try:
        return PROCESSES[name]
    except KeyError:
        raise DomainError(f"unknown process {name!r}; known: {sorted(PROCESSES)}") from None


class _Affine:
    # picklable a + b*x
    def __init__(self, a, b):
        self.a, self.b = float(a), float(b)

    def __call__(self, x):
        return self.a + self.b * x

    def __repr__(self):
        return f"{self.a!r} + {self.b!r}*x"


def affine_process(drift, diffusion, x0=0.0, name="affine") -> ProcessSpec:
    """Process with f(x) = drift[0] + drift[1] x and g(x) = diffusion[0] + diffusion[1] x."""
    a, b = drift
    c, d = diffusion
    bounded = d == 0.0 and c != 0.0
    return ProcessSpec(name, _Affine(a, b), _Affine(c, d), _Affine(d, 0.0), x0=float(x0),
                       diffusion_bounded_below=bounded)


def driver_increments(driver: SamplePath) -> list:
    return np.diff(driver.values).tolist()


def simulate_with_driver(
    spec: ProcessSpec,
    driver: SamplePath,
    m: Optional[int] = None,
    horizon: Optional[float] = None,
    scheme: str = "milstein",
) -> SamplePath:
    """Step the SDE along the increments of a given fBm path.

    ``scheme="euler"`` drops the ``g g' dB^2 / 2`` correction; it exists for
    comparisons only.
    """
    if m is not None and m != driver.m:
        raise DomainError(f"driver has m={driver.m}, requested m={m}")
    if horizon is not None and not math.isclose(horizon, driver.horizon, rel_tol=1e-12):
        raise DomainError(f"driver horizon {driver.horizon} != requested {horizon}")
    if scheme not in ("milstein", "euler"):
        raise DomainError(f"unknown scheme {scheme!r}")
    milstein = scheme == "milstein"
    f, g, dg = spec.drift, spec.diffusion, spec.diffusion_deriv
    dt = driver.horizon / driver.m
    x = float(spec.x0)
    out = [x]
    append = out.append
    isfinite = math.isfinite
    for step, db in enumerate(driver_increments(driver), start=1):
        gx = g(x)
        incr = f(x) * dt + gx * db
        if milstein:
            incr += 0.5 * gx * dg(x) * db * db
        x = x + incr
        if not isfinite(x):
            raise SimulationError(f"non-finite state at step {step} of {spec.name}", step=step)
        append(x)
    return SamplePath(driver.horizon, np.array(out), driver=driver)


def simulate(
    spec: ProcessSpec,
    m: int,
    horizon: float,
    hurst: float,
    seed: int,
    scheme: str = "milstein",
) -> SamplePath:
    """Simulate ``spec`` on ``m`` steps over ``[0, horizon]``; the fBm driver is attached."""
    if not 0.5 < hurst < 1.0:
        raise DomainError(f"SDE simulation requires hurst in (1/2, 1), got {hurst}")
    driver = fbm_path(m, horizon, hurst, seed)
    return simulate_with_driver(spec, driver, scheme=scheme)
