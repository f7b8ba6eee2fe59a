"""Phase extraction along loops of oracles, winding numbers, the
multiple-of-d dichotomy probe, and the odd-map sphere scan.

The central loop is the global-phase circle t -> e^{2 pi i t} Id in the
oracle group.  Phase functions built from programs are sampled along it and
phase-unwrapped with a pi/2 step bound, stricter than the pi aliasing limit,
so that an unresolvable jump (a genuine discontinuity) is distinguished from
undersampling by refinement: doubling the sample count shrinks honest steps
but leaves a true jump at pi no matter the resolution.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg as la
from .model import ModelViolationError, unitary_power

STEP_BOUND = math.pi / 2
ABS_FLOOR = 1e-12
K_MAX = 2 ** 14
WINDING_ROUND_TOL = 0.05


def central_loop(d: int, K: int) -> list[np.ndarray]:
    """K samples of the global-phase loop e^{2 pi i k / K} Id in U(d)."""
    if K < 16:
        raise ValueError("loop sampling needs K >= 16")
    eye = np.eye(d, dtype=complex)
    return [np.exp(2j * np.pi * k / K) * eye for k in range(K)]


def extract_h(alg, u: np.ndarray, m: int) -> complex:
    """Relative-phase witness between the control blocks of a program that
    targets the controlled m-th power; for an exact achiever it equals
    e^{-i phi(U)} times the all-zero success probability."""
    ctrl = alg.layout.control_index
    if ctrl != 0:
        raise ValueError("phase extraction needs the control qubit as factor 0")
    half = alg.total_dim // 2
    d = alg.oracle_dim

    col0 = la.basis_state(alg.total_dim, 0)
    a = alg.apply_cols(u, col0)[:half]

    w_in = unitary_power(u, m).conj().T[:, 0]  # (U^m)^dagger |0>
    rest_dims = alg.dims[2:]
    y = w_in
    for dd in rest_dims:
        y = np.kron(y, la.basis_state(dd, 0))
    col1 = np.concatenate([np.zeros(half, dtype=complex), y])
    w = alg.apply_cols(u, col1)[half:]
    return complex(np.vdot(w, a))


def extract_fplus(alg, u: np.ndarray, m: int) -> complex:
    """Plus-control variant of the phase witness, normalised by the
    plus-control success probability; for an exact achiever it equals
    (1/2) e^{-i phi(U)} and for an eps-approximator stays away from zero."""
    ctrl = alg.layout.control_index
    if ctrl != 0:
        raise ValueError("phase extraction needs the control qubit as factor 0")
    half = alg.total_dim // 2
    col = np.zeros(alg.total_dim, dtype=complex)
    col[0] = 1 / math.sqrt(2)
    col[half] = 1 / math.sqrt(2)
    z = alg.apply_cols(u, col)
    a_plus, b_plus = z[:half], z[half:]
    p_plus = float(np.linalg.norm(z) ** 2)
    if p_plus <= ABS_FLOOR:
        raise ModelViolationError("plus-control postselection probability vanished")
    # U^m compares the branches on the OUTPUT task register, which may be a
    # relabeled factor; indices shift by one once the control is split off
    w = unitary_power(u, m)
    out_targets = [f - 1 for f in alg.out_factors if f != 0]
    a_rot = la.apply_to_factors(a_plus, w, out_targets, alg.dims[1:])
    return complex(np.vdot(b_plus, a_rot) / p_plus)


def neutral_phase(alg, u: np.ndarray) -> complex:
    """Normalised all-zero matrix element; unimodular whenever the all-zero
    success probability is nonzero."""
    col = alg.apply_cols(u, la.basis_state(alg.total_dim, 0))
    nrm = np.linalg.norm(col)
    if nrm <= ABS_FLOOR:
        raise ModelViolationError("all-zero postselection probability vanished")
    return complex(col[0] / nrm)


@dataclass
class LoopTrace:
    """Sampled phase function along the central loop.

    ``unwrapped`` has one extra entry closing the loop back to t = 1; the
    winding number is its net increase over 2 pi.  A trace is valid when no
    sample vanishes and every unwrapping step stays below pi/2.
    """

    d: int
    K: int
    ts: np.ndarray
    values: np.ndarray
    unwrapped: np.ndarray
    valid: bool
    winding: int | None
    min_abs: float
    max_step: float
    jump_location: float | None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["t", "re_f", "im_f", "unwrapped_phase"])
            for t, v, p in zip(self.ts, self.values, self.unwrapped[:-1]):
                w.writerow([f"{t:.12g}", f"{v.real:.17g}", f"{v.imag:.17g}", f"{p:.17g}"])


def loop_trace(f: Callable[[np.ndarray], complex], d: int, K: int) -> LoopTrace:
    """Sample f along the central loop and unwrap its phase."""
    us = central_loop(d, K)
    values = np.array([f(u) for u in us], dtype=complex)
    ts = np.arange(K) / K
    mags = np.abs(values)
    min_abs = float(mags.min()) if K else 0.0

    closed = np.append(values, values[0])
    steps = np.angle(closed[1:] / np.where(np.abs(closed[:-1]) > 0, closed[:-1], 1.0))
    unwrapped = np.empty(K + 1)
    unwrapped[0] = np.angle(values[0])
    unwrapped[1:] = unwrapped[0] + np.cumsum(steps)
    max_step = float(np.max(np.abs(steps))) if K else 0.0

    valid = min_abs > ABS_FLOOR and max_step < STEP_BOUND
    winding = None
    jump = None
    if valid:
        raw = (unwrapped[-1] - unwrapped[0]) / (2 * np.pi)
        nearest = round(raw)
        if abs(raw - nearest) < WINDING_ROUND_TOL:
            winding = int(nearest)
        else:
            valid = False
    if not valid:
        bad = int(np.argmax(np.abs(steps)))
        jump = float((bad + 1) / K) if max_step >= STEP_BOUND else float(np.argmin(mags) / K)
    return LoopTrace(d=d, K=K, ts=ts, values=values, unwrapped=unwrapped,
                     valid=valid, winding=winding, min_abs=min_abs,
                     max_step=max_step, jump_location=jump)


def winding(f: Callable[[np.ndarray], complex], d: int, K: int = 256,
            k_max: int = K_MAX) -> LoopTrace:
    """Winding number of f along the central loop, refining the sampling by
    doubling K until the trace is valid or k_max is reached.  The returned
    trace carries either the integer winding or the surviving jump location."""
    trace = loop_trace(f, d, K)
    while not trace.valid and trace.K < k_max:
        trace = loop_trace(f, d, min(2 * trace.K, k_max))
    return trace


@dataclass
class ProbeReport:
    m: int
    d: int
    K: int
    valid: bool
    winding: int | None
    min_abs: float
    jump_location: float | None
    winding_matches_m: bool
    divisibility_ok: bool
    trace: LoopTrace = field(repr=False)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "K": self.K,
            "winding": self.winding,
            "valid": self.valid,
            "min_abs": self.min_abs,
            "jump_location": self.jump_location,
            "winding_matches_m": self.winding_matches_m,
            "divisibility_ok": self.divisibility_ok,
        }


def dichotomy_probe(alg, m: int, d: int, K: int = 256, use_fplus: bool = False,
                    k_max: int = K_MAX) -> ProbeReport:
    """Wind the phase witness of a would-be controlled-m-th-power program
    along the central loop.

    A homogeneous program of net degree m must produce a trace winding
    exactly m; a valid trace with m not a multiple of d certifies that the
    object cannot be a continuous oracle program, and an invalid trace
    (an unresolvable jump or a vanishing witness) is the other face of the
    same obstruction.
    """
    extractor = extract_fplus if use_fplus else extract_h
    trace = winding(lambda u: extractor(alg, u, m), d, K, k_max)
    matches = trace.valid and trace.winding == m
    divisible = (not trace.valid) or trace.winding % d == 0
    return ProbeReport(m=m, d=d, K=trace.K, valid=trace.valid,
                       winding=trace.winding, min_abs=trace.min_abs,
                       jump_location=trace.jump_location,
                       winding_matches_m=matches, divisibility_ok=divisible,
                       trace=trace)


# -- odd-map sphere scan -------------------------------------------------------


def bu_map_g(x: np.ndarray, d: int) -> np.ndarray:
    """Odd embedding of the 3-sphere into the d-dimensional unitaries (d
    even): paired diagonal entries x1 +/- i x2 and antidiagonal entries
    -/+ x3 + i x4; g(1,0,0,0) is the identity and g(-x) = -g(x)."""
    if d % 2 != 0:
        raise ValueError("the sphere embedding needs even dimension")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != 4 or abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise ValueError("input must be a unit 4-vector")
    x1, x2, x3, x4 = x
    g = np.zeros((d, d), dtype=complex)
    for i in range(d // 2):
        j = d - 1 - i
        g[i, i] = x1 + 1j * x2
        g[j, j] = x1 - 1j * x2
        g[i, j] = -x3 + 1j * x4
        g[j, i] = x3 + 1j * x4
    return g


@dataclass
class SphereGrid:
    """Antipodally closed point set on the 3-sphere: points[i + n_half] is
    exactly -points[i]."""

    points: np.ndarray
    resolution: int

    @property
    def n_half(self) -> int:
        return self.points.shape[0] // 2

    def __len__(self) -> int:
        return self.points.shape[0]


def sphere_grid(resolution: int) -> SphereGrid:
    """Product grid in hyperspherical coordinates, offset from the poles, and
    closed under x -> -x by explicit pairing."""
    n = int(resolution)
    if n < 2:
        raise ValueError("grid resolution must be >= 2")
    psis = np.pi * (np.arange(n) + 0.5) / n
    thetas = np.pi * (np.arange(n) + 0.5) / n
    phis = 2 * np.pi * np.arange(2 * n) / (2 * n)
    pts = []
    for psi in psis:
        sp, cp = math.sin(psi), math.cos(psi)
        for th in thetas:
            st, ct = math.sin(th), math.cos(th)
            for ph in phis:
                pts.append((cp, sp * ct, sp * st * math.cos(ph), sp * st * math.sin(ph)))
    half = np.asarray(pts)
    half /= np.linalg.norm(half, axis=1, keepdims=True)
    return SphereGrid(points=np.vstack([half, -half]), resolution=n)


@dataclass
class BuScanReport:
    min_abs: float
    argmin: np.ndarray
    oddness_residual: float
    n_points: int


def bu_scan(h_eval: Callable[[np.ndarray], complex], d: int, grid: SphereGrid) -> BuScanReport:
    """Evaluate h over the embedded sphere: report the smallest modulus (an
    odd continuous h must vanish somewhere, so this tends to zero under
    refinement) and the worst antipodal-oddness defect max |h(-x) + h(x)|."""
    if d % 2 != 0:
        raise ValueError("the sphere scan needs even dimension")
    vals = np.array([h_eval(bu_map_g(x, d)) for x in grid.points], dtype=complex)
    mags = np.abs(vals)
    best = int(np.argmin(mags))
    n_half = grid.n_half
    oddness = float(np.max(np.abs(vals[:n_half] + vals[n_half:])))
    return BuScanReport(min_abs=float(mags[best]), argmin=grid.points[best],
                        oddness_residual=oddness, n_points=len(grid))
