"""Bohr-frequency groups, level-shift matrices, resonance energies and
decay rates.

Matrix elements (m, n) of the reduced density matrix are labelled by
their Bohr frequency e = E_m - E_n; all pairs sharing an e (up to a
clustering tolerance) form a group that evolves jointly.  For each
group the second-order level-shift matrix acts on the column vector of
the group's density-matrix elements:

    L_e[(m,n),(k,l)] = i K[m,k] delta_{nl} [E_m = E_k]
                     + i conj(K[n,l]) delta_{mk} [E_n = E_l]
                     - i pi D(E_k - E_m) G[m,k] G[l,n]

with K[m,k] = sum_j G[m,j] G[j,k] W(E_m - E_j), W the one-sided
reservoir correlation transform and D the signed thermal spectral
density (reservoir module).  Several coupling channels add with weights
(strength_r / lam)^2 where lam = max_r |strength_r|.  Eigenvalues
delta_e^(s) of L_e give resonance energies
eps_e^(s) = e + lam^2 delta_e^(s); the group decay rate is the smallest
Im eps over the nonzero resonance energies.

Group assembly and diagonalization are independent across groups and
may run in a thread pool; results are always merged in sorted-e order,
so output is deterministic for any parallelism degree.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AmbiguousClustering,
    DefectiveLevelShift,
)
from .model import SystemSpec
from .reservoir import ReservoirTransforms

__all__ = [
    "BohrSpectrum",
    "ResonanceData",
    "NonoverlapReport",
    "bohr_spectrum",
    "level_shift_operator",
    "resonance_energies",
    "check_nonoverlap",
]

#: a resonance energy is treated as exactly zero below this modulus
ZERO_RESONANCE_TOL = 1e-12
#: eigenvalue distinctness tolerance when counting the splitting
DISTINCTNESS_TOL = 1e-10
#: eigenvector-basis condition number above which a level-shift matrix
#: is reported as non-diagonalizable
DEFECTIVE_COND = 1e8


# =====================================================================
# Bohr spectrum
# =====================================================================

@dataclass(frozen=True)
class BohrSpectrum:
    """Partition of all N^2 index pairs by energy difference.

    ``groups`` maps each representative Bohr frequency e to the list of
    0-based index pairs (m, n) with E_m - E_n = e up to the clustering
    tolerance.  The e = 0 group always contains all diagonal pairs.
    """

    groups: dict
    tolerance: float

    @property
    def frequencies(self) -> np.ndarray:
        return np.array(sorted(self.groups.keys()))

    def group_of_pair(self, m: int, n: int) -> float:
        for e, pairs in self.groups.items():
            if (m, n) in pairs:
                return e
        raise KeyError((m, n))


def default_cluster_tolerance(energies: np.ndarray) -> float:
    """1e-9 times the largest level spacing magnitude, floored at 1e-12."""
    energies = np.asarray(energies, dtype=float)
    spread = float(energies.max() - energies.min()) if energies.size else 0.0
    return max(1e-9 * spread, 1e-12)


def bohr_spectrum(spec: SystemSpec, tol: float | None = None) -> BohrSpectrum:
    """Cluster all energy differences E_m - E_n into Bohr groups.

    Single-linkage clustering: sorted differences are split wherever the
    gap exceeds ``tol``.  The representative frequency is the cluster
    mean, snapped to exactly 0.0 for the cluster containing the
    diagonal pairs.  Raises AmbiguousClustering when two distinct
    clusters approach each other within 10*tol.
    """
    if tol is None:
        tol = default_cluster_tolerance(spec.energies)
    if tol <= 0.0:
        raise ValueError("tol must be > 0")
    n = spec.dim
    e_vals = spec.energies
    mm, nn = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    diffs = (e_vals[:, None] - e_vals[None, :]).ravel()
    pairs = list(zip(mm.ravel().tolist(), nn.ravel().tolist()))

    order = np.argsort(diffs, kind="stable")
    sorted_diffs = diffs[order]
    gaps = np.diff(sorted_diffs)
    boundaries = np.nonzero(gaps > tol)[0]
    starts = np.concatenate(([0], boundaries + 1))
    ends = np.concatenate((boundaries + 1, [len(sorted_diffs)]))

    # stability guard: neighbouring clusters must be separated by a
    # comfortable multiple of the tolerance
    for b in boundaries:
        if sorted_diffs[b + 1] - sorted_diffs[b] < 10.0 * tol:
            raise AmbiguousClustering(
                "energy-difference clusters separated by only "
                f"{sorted_diffs[b + 1] - sorted_diffs[b]:.3e} "
                f"(tolerance {tol:.3e}); grouping is unstable")

    groups: dict = {}
    for a, b in zip(starts, ends):
        members = [pairs[i] for i in order[a:b].tolist()]
        chunk = sorted_diffs[a:b]
        has_exact_zero = any(p[0] == p[1] for p in members) or \
            np.any(chunk == 0.0)
        e_rep = 0.0 if has_exact_zero else float(chunk.mean())
        groups[e_rep] = sorted(members)
    return BohrSpectrum(groups=groups, tolerance=float(tol))


# =====================================================================
# Level-shift assembly
# =====================================================================

def _channel_level_shift(energies, G, transforms: ReservoirTransforms,
                         pairs, deg_tol: float) -> np.ndarray:
    """Level-shift matrix of one reservoir channel on one Bohr group."""
    m_idx = np.array([p[0] for p in pairs])
    n_idx = np.array([p[1] for p in pairs])
    d = len(pairs)
    E = np.asarray(energies, dtype=float)
    G = np.asarray(G, dtype=complex)

    # K[m, k] = sum_j G[m, j] G[j, k] W(E_m - E_j), supported on
    # G's sparsity pattern for the W evaluations
    nz = np.nonzero(np.abs(G) > 0.0)
    W = np.zeros_like(G)
    for m, j in zip(*nz):
        W[m, j] = transforms.wplus(E[m] - E[j])
    K = (G * W) @ G

    Em = E[m_idx]
    En = E[n_idx]
    same_m = (m_idx[:, None] == m_idx[None, :])
    same_n = (n_idx[:, None] == n_idx[None, :])
    em_equal = np.abs(Em[:, None] - Em[None, :]) <= deg_tol
    en_equal = np.abs(En[:, None] - En[None, :]) <= deg_tol

    lam_mat = np.zeros((d, d), dtype=complex)
    lam_mat += 1j * K[np.ix_(m_idx, m_idx)] * (same_n & em_equal)
    lam_mat += 1j * np.conj(K[np.ix_(n_idx, n_idx)]) * (same_m & en_equal)

    # amp[p, q] = G[m_p, m_q] * G[n_q, n_p]
    amp = G[np.ix_(m_idx, m_idx)] * G[np.ix_(n_idx, n_idx)].T
    nzj = np.nonzero(np.abs(amp) > 0.0)
    if nzj[0].size:
        dens = np.zeros((d, d))
        for p, q in zip(*nzj):
            dens[p, q] = transforms.density(E[m_idx[q]] - E[m_idx[p]])
        lam_mat -= 1j * np.pi * dens * amp
    return lam_mat


def _make_transforms(spec: SystemSpec):
    """One ReservoirTransforms per nonzero channel, with every needed
    frequency precomputed (so later reads are thread-safe)."""
    channels = []
    E = spec.energies
    for term in spec.couplings:
        if term.strength == 0.0 or term.form_factor.is_zero:
            continue
        tr = ReservoirTransforms(term.form_factor, spec.beta)
        G = term.matrix
        nz = np.nonzero(np.abs(G) > 0.0)
        tr.precompute(E[m] - E[j] for m, j in zip(*nz))
        # the jump terms may probe any difference of level energies
        # connected through G's support twice; precompute all pair
        # differences of levels that carry any coupling
        touched = sorted(set(nz[0].tolist()) | set(nz[1].tolist()))
        for a in touched:
            for b in touched:
                tr.density(E[a] - E[b])
        channels.append((term, tr))
    return channels


def level_shift_operator(spec: SystemSpec, e: float, group,
                         tol: float | None = None) -> np.ndarray:
    """The second-order level-shift matrix on one Bohr group.

    ``group`` is the list of index pairs from ``bohr_spectrum``.
    Channels are summed with weights (strength_r / lam)^2,
    lam = max_r |strength_r|.
    """
    if tol is None:
        tol = default_cluster_tolerance(spec.energies)
    lam = spec.overall_coupling
    d = len(group)
    out = np.zeros((d, d), dtype=complex)
    if lam == 0.0:
        return out
    for term, tr in _make_transforms(spec):
        weight = (term.strength / lam) ** 2
        out += weight * _channel_level_shift(
            spec.energies, term.matrix, tr, group, tol)
    return out


# =====================================================================
# Resonance data
# =====================================================================

@dataclass(frozen=True)
class ResonanceData:
    """Spectral data of one Bohr group.

    epsilons[s] = e + lam^2 * deltas[s]; right_vectors (columns) and
    left_vectors (rows, = inverse of right_vectors) biorthogonally
    diagonalize Lambda; nu counts distinct deltas at tolerance 1e-10;
    gamma = min Im eps over resonance energies with |eps| > 1e-12,
    or 0.0 when there is none.
    """

    e: float
    pairs: tuple
    Lambda: np.ndarray
    deltas: np.ndarray
    nu: int
    epsilons: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    gamma: float


def _count_distinct(values: np.ndarray, tol: float) -> int:
    remaining = list(values)
    count = 0
    while remaining:
        v = remaining.pop()
        count += 1
        remaining = [u for u in remaining if abs(u - v) > tol]
    return count


def _diagonalize_group(e: float, pairs, lam_mat: np.ndarray,
                       lam: float) -> ResonanceData:
    d = lam_mat.shape[0]
    if d == 1:
        deltas = np.array([lam_mat[0, 0]])
        vr = np.ones((1, 1), dtype=complex)
        vl = np.ones((1, 1), dtype=complex)
    else:
        deltas, vr = scipy.linalg.eig(lam_mat)
        cond = np.linalg.cond(vr)
        if not np.isfinite(cond) or cond > DEFECTIVE_COND:
            raise DefectiveLevelShift(
                f"level-shift matrix of group e = {e:.6g} has eigenvector "
                f"condition number {cond:.3e} (> {DEFECTIVE_COND:.0e})")
        order = np.lexsort((deltas.imag.round(12), deltas.real.round(12)))
        deltas = deltas[order]
        vr = vr[:, order]
        vl = np.linalg.inv(vr)
    epsilons = e + lam ** 2 * deltas
    nonzero = np.abs(epsilons) > ZERO_RESONANCE_TOL
    gamma = float(epsilons.imag[nonzero].min()) if np.any(nonzero) else 0.0
    nu = _count_distinct(deltas, DISTINCTNESS_TOL)
    return ResonanceData(e=e, pairs=tuple(pairs), Lambda=lam_mat,
                         deltas=deltas, nu=nu, epsilons=epsilons,
                         right_vectors=vr, left_vectors=vl, gamma=gamma)


def _parallel_degree(parallel: int | None) -> int:
    if parallel is not None:
        return max(1, int(parallel))
    env = os.environ.get("RESODEC_PARALLEL", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def resonance_energies(spec: SystemSpec, tol: float | None = None,
                       parallel: int | None = None) -> list:
    """Level-shift matrices, resonance energies and decay rates for
    every Bohr group, sorted by Bohr frequency.

    ``parallel`` (or the RESODEC_PARALLEL environment variable) sets
    the thread-pool width for per-group assembly; the output never
    depends on it.
    """
    spectrum = bohr_spectrum(spec, tol)
    deg_tol = spectrum.tolerance
    lam = spec.overall_coupling
    channels = _make_transforms(spec) if lam != 0.0 else []
    keys = sorted(spectrum.groups.keys())

    def work(e):
        pairs = spectrum.groups[e]
        d = len(pairs)
        lam_mat = np.zeros((d, d), dtype=complex)
        if lam != 0.0:
            for term, tr in channels:
                weight = (term.strength / lam) ** 2
                lam_mat += weight * _channel_level_shift(
                    spec.energies, term.matrix, tr, pairs, deg_tol)
        return _diagonalize_group(e, pairs, lam_mat, lam)

    degree = _parallel_degree(parallel)
    if degree == 1 or len(keys) == 1:
        return [work(e) for e in keys]
    with ThreadPoolExecutor(max_workers=degree) as pool:
        return list(pool.map(work, keys))


# =====================================================================
# Non-overlap diagnostic
# =====================================================================

@dataclass(frozen=True)
class NonoverlapReport:
    """Scale separation between Bohr-frequency gaps and second-order
    shifts: margin = min gap / max |lam^2 delta|; PASS at margin >= 10."""

    margin: float
    min_gap: float
    max_shift: float
    passed: bool


def check_nonoverlap(spec: SystemSpec, tol: float | None = None,
                     resonances: list | None = None) -> NonoverlapReport:
    """Measure the non-overlapping-resonances margin for a spec."""
    if resonances is None:
        resonances = resonance_energies(spec, tol)
    es = np.array([r.e for r in resonances])
    if len(es) < 2:
        min_gap = np.inf
    else:
        min_gap = float(np.diff(np.sort(es)).min())
    lam = spec.overall_coupling
    max_shift = max((float(np.max(np.abs(lam ** 2 * r.deltas)))
                     if r.deltas.size else 0.0) for r in resonances)
    margin = np.inf if max_shift == 0.0 else min_gap / max_shift
    return NonoverlapReport(margin=float(margin), min_gap=min_gap,
                            max_shift=float(max_shift),
                            passed=bool(margin >= 10.0))
