"""Transmission resonances of the double delta cavity and concurrence zeros.

Scan inputs (couplings, wavenumber ranges) are in internal units like the
rest of the library; reported tables and alignment reports use 2*pi/d units
so they can be compared directly with sweep configurations and CSV output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chanmath import TWO_PI, to_cycles
from .scattering import double_delta_closed_form

# A local maximum of |t|^2 counts as a resonance only when it reaches this
# close to unity; real symmetric double deltas peak at exactly 1.
PEAK_THRESHOLD = 1.0 - 1e-10

# Default golden-section refinement width, 1e-10 in 2*pi/d units.
DEFAULT_TOL = TWO_PI * 1e-10

# Refined minima of the concurrence below this are genuine zeros.
ZERO_ETA_THRESHOLD = 1e-8

SAMPLES_PER_SPACING = 40

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, a, b, tol):
    """Minimize a unimodal scalar function on [a, b] to bracket width tol.

    Returns (x, f(x), final bracket width).
    """
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x), b - a


def transmission(u, k, d=1.0):
    """Same-channel transmission probability |t|^2 of the double delta cavity."""
    pair = double_delta_closed_form(u, k, d)
    return np.abs(pair.t) ** 2


def reflection_sq(u, k, d=1.0):
    """Same-channel reflection probability |r|^2 of the double delta cavity."""
    pair = double_delta_closed_form(u, k, d)
    return np.abs(pair.r) ** 2


def scan_transmission(u, d, k_lo, k_hi, n_samples=None):
    """Uniformly sample |t(k)|^2 over [k_lo, k_hi].

    The default density is 40 samples per expected resonance spacing pi/d.
    Returns (k grid, transmission values).
    """
    if not (0 < k_lo < k_hi):
        raise ValueError("need 0 < k_lo < k_hi")
    if n_samples is None:
        n_samples = max(int(np.ceil((k_hi - k_lo) / (np.pi / d) * SAMPLES_PER_SPACING)), 8) + 1
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    ks = np.linspace(k_lo, k_hi, n_samples)
    return ks, transmission(u, ks, d)


@dataclass(frozen=True)
class ResonanceEntry:
    """One refined resonance; k_res and refinement_width are in 2*pi/d units."""

    k_res: float
    transmission_at_peak: float
    refinement_width: float


@dataclass(frozen=True)
class ResonanceTable:
    channel: int
    entries: tuple

    @property
    def positions(self):
        """Resonance positions in 2*pi/d units, ascending."""
        return np.array([e.k_res for e in self.entries])


def find_resonances(u, d, k_lo, k_hi, tol=DEFAULT_TOL, channel=1):
    """Locate and refine all transmission resonances of one channel in a range.

    Local maxima of the sampled |t|^2 curve are bracketed on the scan grid
    and refined by golden-section search until the k-interval is below tol
    (internal units); only peaks reaching 1 - 1e-10 are kept.  An empty
    table is a valid result, not an error.

    The refinement objective is |r(k)|^2, which by flux conservation has its
    zero exactly at the |t|^2 maximum: near the peak 1 - |t|^2 underflows
    the 1-ulp floor of |t|^2 ~ 1 and goes numerically flat, while |r| keeps
    full absolute precision through its linear zero crossing.
    """
    if not (0 < tol <= 1e-6 * TWO_PI):
        raise ValueError("tol must be in (0, 1e-6] (2*pi/d units)")
    ks, ts = scan_transmission(u, d, k_lo, k_hi)
    entries = []
    for i in range(1, len(ks) - 1):
        if ts[i] >= ts[i - 1] and ts[i] >= ts[i + 1] and (ts[i] > ts[i - 1] or ts[i] > ts[i + 1]):
            k_peak, _, width = golden_section_min(
                lambda k: reflection_sq(u, k, d), ks[i - 1], ks[i + 1], tol
            )
            t_peak = float(transmission(u, k_peak, d))
            if t_peak >= PEAK_THRESHOLD:
                entries.append(ResonanceEntry(
                    k_res=to_cycles(k_peak),
                    transmission_at_peak=t_peak,
                    refinement_width=to_cycles(width),
                ))
    entries.sort(key=lambda e: e.k_res)
    return ResonanceTable(channel=channel, entries=tuple(entries))


@dataclass(frozen=True)
class ZeroMatch:
    """One refined concurrence zero paired with its nearest resonance.

    Positions are in 2*pi/d units; nearest_resonance is None when the table
    offered no candidate at all.
    """

    dk: float
    k2: float
    eta: float
    nearest_resonance: float | None
    distance: float
    matched: bool


@dataclass(frozen=True)
class ZeroAlignmentReport:
    matches: tuple
    all_zero: bool = False

    @property
    def unmatched(self):
        return tuple(m for m in self.matches if not m.matched)


def zero_alignment(dk_grid, eta_grid, resonances, k1, eta_fn=None,
                   tol=1e-8, channel1_resonances=None):
    """Pair refined concurrence zeros along a dk sweep with resonances.

    Parameters
    ----------
    dk_grid, eta_grid : arrays
        Sampled concurrence curve at fixed k1, everything in 2*pi/d units.
        The sampling must be fine enough that every zero shows up as a
        bracketed local minimum.
    resonances : ResonanceTable
        Channel-2 resonances covering the swept k2 range.
    k1 : float
        Fixed first wavenumber in 2*pi/d units.
    eta_fn : callable, optional
        eta(dk) for refinement; without it the sampled minima are used as-is.
    tol : float
        Matching tolerance; a zero farther than 10*tol from every resonance
        is flagged unmatched, which signals a failed invariant.
    channel1_resonances : ResonanceTable, optional
        When the sweep crosses channel-1 resonances (general 2D sweeps),
        zeros may align with those instead; pass the table to allow it.

    Notes
    -----
    When k1 sits exactly on a channel-1 resonance the curve vanishes
    identically; that degenerate case is reported with all_zero=True and no
    individual zeros.
    """
    dk_grid = np.asarray(dk_grid, dtype=float)
    eta_grid = np.asarray(eta_grid, dtype=float)
    if dk_grid.shape != eta_grid.shape or dk_grid.size < 3:
        raise ValueError("need matching dk/eta arrays with at least 3 samples")

    if float(eta_grid.max()) < ZERO_ETA_THRESHOLD:
        return ZeroAlignmentReport(matches=(), all_zero=True)

    candidates = np.array([e.k_res for e in resonances.entries])
    extra = (np.array([e.k_res for e in channel1_resonances.entries])
             if channel1_resonances is not None else np.empty(0))

    matches = []
    for i in range(1, dk_grid.size - 1):
        if not (eta_grid[i] <= eta_grid[i - 1] and eta_grid[i] <= eta_grid[i + 1]):
            continue
        if eta_fn is not None:
            dk0, eta0, _ = golden_section_min(
                eta_fn, dk_grid[i - 1], dk_grid[i + 1], tol * 1e-2
            )
        else:
            dk0, eta0 = float(dk_grid[i]), float(eta_grid[i])
        if eta0 >= ZERO_ETA_THRESHOLD:
            continue
        k2 = k1 + dk0
        if candidates.size or extra.size:
            # channel-2 zeros live at k2 = k_res; channel-1 zeros at k1 = k_res
            dist2 = np.abs(candidates - k2) if candidates.size else np.array([np.inf])
            dist1 = np.abs(extra - k1) if extra.size else np.array([np.inf])
            if dist2.min() <= dist1.min():
                nearest = float(candidates[np.argmin(dist2)])
                distance = float(dist2.min())
            else:
                nearest = float(extra[np.argmin(dist1)])
                distance = float(dist1.min())
        else:
            nearest, distance = None, float("inf")
        matches.append(ZeroMatch(
            dk=float(dk0), k2=float(k2), eta=float(eta0),
            nearest_resonance=nearest, distance=distance,
            matched=distance <= 10.0 * tol,
        ))
    return ZeroAlignmentReport(matches=tuple(matches))
