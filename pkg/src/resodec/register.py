"""Qubit-register specialization: Bohr frequencies of configuration
pairs, Hamming data, generic-field diagnostics, per-group decoherence
rates with channel attribution, and system-size scaling studies.

A register of N qubits couples collectively to two reservoirs: a
dephasing channel through the total magnetization (conserving the
register energy when the internal couplings vanish) and an exchange
channel through the total spin-flip operator.  Matrix elements are
labelled by configuration pairs (sigma, tau) in {+1,-1}^N; the pair's
Bohr frequency, Hamming distance D = sum |sigma_j - tau_j| and
magnetization difference e0 = sum (sigma_j - tau_j) organize the decay
rates.  Channel attribution is operational: the resonance pipeline runs
three times (both channels, dephasing only, exchange only) and the
cross contribution is the difference.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import BadConfiguration, TooLargeForExhaustiveCheck
from .model import (
    FormFactor,
    RegisterSpec,
    energy_of_configuration,
    register_to_system,
    spin_configuration,
)
from .resonances import resonance_energies

__all__ = [
    "PairLabel",
    "RateReport",
    "GenericFieldReport",
    "RegisterTemplate",
    "ScalingRow",
    "ScalingTable",
    "register_bohr",
    "hamming_and_e0",
    "generic_field_check",
    "decoherence_rates",
    "scaling_study",
]


# =====================================================================
# Configuration pairs
# =====================================================================

@dataclass(frozen=True)
class PairLabel:
    """A pair of spin configurations labelling one matrix element."""

    sigma: tuple
    tau: tuple

    def __post_init__(self):
        if len(self.sigma) != len(self.tau):
            raise BadConfiguration("configurations must have equal length")


def _check_configuration(sigma) -> tuple:
    sigma = tuple(int(s) for s in sigma)
    if not sigma or any(s not in (-1, 1) for s in sigma):
        raise BadConfiguration(
            "a spin configuration is a nonempty tuple of +1/-1 entries, "
            f"got {sigma!r}")
    return sigma


def register_bohr(reg: RegisterSpec, sigma, tau) -> float:
    """Bohr frequency e(sigma, tau) = E(sigma) - E(tau) of a register
    matrix element; computed exactly as the energy difference."""
    sigma = _check_configuration(sigma)
    tau = _check_configuration(tau)
    if len(sigma) != reg.n_qubits or len(tau) != reg.n_qubits:
        raise BadConfiguration(
            f"configurations of length {len(sigma)}/{len(tau)} do not fit "
            f"a register of {reg.n_qubits} qubits")
    return energy_of_configuration(reg, sigma) \
        - energy_of_configuration(reg, tau)


def hamming_and_e0(sigma, tau) -> tuple:
    """(D, e0, N0): Hamming distance D = sum |sigma_j - tau_j|,
    magnetization difference e0 = sum (sigma_j - tau_j), and the count
    N0 of agreeing positions.  D + 2 N0 = 2 N always holds."""
    sigma = _check_configuration(sigma)
    tau = _check_configuration(tau)
    if len(sigma) != len(tau):
        raise BadConfiguration("configurations must have equal length")
    d = sum(abs(s - t) for s, t in zip(sigma, tau))
    e0 = sum(s - t for s, t in zip(sigma, tau))
    n0 = sum(1 for s, t in zip(sigma, tau) if s == t)
    assert d + 2 * n0 == 2 * len(sigma)
    return d, e0, n0


# =====================================================================
# Generic-field check
# =====================================================================

@dataclass(frozen=True)
class GenericFieldReport:
    """Result of the integer-relation scan over the field values.

    ``passed`` is True when no nonzero integer vector n with entries in
    {-n_max..n_max} annihilates B; otherwise ``witness`` holds one such
    vector (degenerate fields merge Bohr groups).
    """

    passed: bool
    witness: tuple | None = None


def generic_field_check(B, n_max: int = 2) -> GenericFieldReport:
    """Exhaustively scan integer combinations of the field values.

    FAIL with a witness when some nonzero n in {0,+-1,..,+-n_max}^N has
    |sum_j B_j n_j| <= 1e-12 max|B|; registers beyond N = 12 are
    rejected (the scan is exponential).
    """
    B = np.asarray(B, dtype=float)
    n = B.size
    if n > 12:
        raise TooLargeForExhaustiveCheck(
            f"generic-field scan is exhaustive over (2 n_max + 1)^N "
            f"vectors; N = {n} > 12 is not supported")
    scale = float(np.max(np.abs(B))) if n else 0.0
    threshold = 1e-12 * scale
    # small entries first, so a returned witness is a simplest relation
    values = [0]
    for k in range(1, n_max + 1):
        values.extend((k, -k))
    for vec in product(values, repeat=n):
        if all(v == 0 for v in vec):
            continue
        if abs(float(np.dot(B, vec))) <= threshold:
            return GenericFieldReport(passed=False, witness=vec)
    return GenericFieldReport(passed=True, witness=None)


# =====================================================================
# Decoherence rates with channel attribution
# =====================================================================

@dataclass(frozen=True)
class RateReport:
    """Decay data of one register Bohr group.

    ``gamma`` is the full two-channel rate; ``gamma_conserving`` and
    ``gamma_exchange`` come from re-running the pipeline with the other
    channel switched off, and ``gamma_cross`` is the remainder.  ``e0``
    and ``hamming`` are evaluated on the group's first configuration
    pair (for a generic field all pairs of a group share them).
    """

    e: float
    gamma: float
    gamma_conserving: float
    gamma_exchange: float
    gamma_cross: float
    e0: int
    hamming: int
    group_pairs: tuple


def _pair_labels(pairs, n_qubits: int) -> tuple:
    labels = []
    for m, n in pairs:
        sigma = tuple(int(s) for s in spin_configuration(m, n_qubits))
        tau = tuple(int(s) for s in spin_configuration(n, n_qubits))
        labels.append(PairLabel(sigma=sigma, tau=tau))
    return tuple(labels)


def _gamma_by_frequency(reg: RegisterSpec, tol, parallel) -> dict:
    system = register_to_system(reg)
    data = resonance_energies(system, tol, parallel=parallel)
    return {r.e: r for r in data}


def decoherence_rates(reg: RegisterSpec, tol: float | None = None,
                      parallel: int | None = None) -> list:
    """Per-group decay rates of a register, attributed by channel.

    Runs the resonance pipeline with both channels, with the exchange
    channel off, and with the conserving channel off; the Bohr groups
    coincide across runs because they depend only on the energies.
    Warns when the field values fail the generic check (groups merge)
    -- the rates are still computed for the merged groups.
    """
    if reg.n_qubits <= 12:
        field_ok = generic_field_check(reg.B)
        if not field_ok.passed and reg.n_qubits > 1:
            warnings.warn(
                "field values admit the integer relation "
                f"{field_ok.witness}; Bohr groups merge and rate "
                "labels use merged-group representatives", UserWarning,
                stacklevel=2)

    full = _gamma_by_frequency(reg, tol, parallel)
    conserving = _gamma_by_frequency(
        dataclasses.replace(reg, lambda2=0.0), tol, parallel)
    exchange = _gamma_by_frequency(
        dataclasses.replace(reg, lambda1=0.0), tol, parallel)

    reports = []
    for e in sorted(full.keys()):
        r = full[e]
        g_full = r.gamma
        g_cons = conserving[e].gamma
        g_exch = exchange[e].gamma
        labels = _pair_labels(r.pairs, reg.n_qubits)
        d, e0, _ = hamming_and_e0(labels[0].sigma, labels[0].tau)
        reports.append(RateReport(
            e=e, gamma=g_full, gamma_conserving=g_cons,
            gamma_exchange=g_exch,
            gamma_cross=g_full - g_cons - g_exch,
            e0=e0, hamming=d, group_pairs=labels))
    return reports


# =====================================================================
# Scaling studies
# =====================================================================

@dataclass(frozen=True)
class RegisterTemplate:
    """Size-independent register data for scaling studies.

    Field values are drawn i.i.d. uniform from ``b_interval`` (a fresh
    draw for each register size, from a seed-and-size keyed stream);
    internal couplings J are zero.
    """

    lambda1: float
    lambda2: float
    g1: FormFactor
    g2: FormFactor
    beta: float
    b_interval: tuple = (0.45, 0.55)

    def __post_init__(self):
        lo, hi = self.b_interval
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError("b_interval must be a finite (low, high) "
                             "pair with low < high")

    def realize(self, n_qubits: int, seed: int,
                attenuate: bool = False) -> RegisterSpec:
        """Concrete register of ``n_qubits`` qubits with drawn fields."""
        rng = np.random.default_rng([seed, n_qubits])
        lo, hi = self.b_interval
        B = rng.uniform(lo, hi, n_qubits)
        lam1, lam2 = self.lambda1, self.lambda2
        if attenuate:
            lam1 = lam1 / n_qubits
            lam2 = lam2 / np.sqrt(n_qubits)
        return RegisterSpec(n_qubits=n_qubits,
                            J=np.zeros((n_qubits, n_qubits)),
                            B=B, lambda1=lam1, lambda2=lam2,
                            g1=self.g1, g2=self.g2, beta=self.beta)


@dataclass(frozen=True)
class ScalingRow:
    """Scaling observables at one register size."""

    n_qubits: int
    max_gamma_conserving: float
    max_gamma_exchange: float
    gamma0: float


@dataclass(frozen=True)
class ScalingTable:
    """Scaling rows plus fitted log-log exponents.

    ``conserving_exponent`` and ``exchange_exponent`` are least-squares
    slopes of log(max rate) against log N; ``gamma0_spread`` is the
    relative spread (max - min)/mean of the thermalization rate of the
    exchange channel across sizes.
    """

    rows: tuple
    conserving_exponent: float
    exchange_exponent: float
    gamma0_spread: float


def _loglog_slope(ns, values) -> float:
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > 0.0
    if keep.sum() < 2:
        return float("nan")
    slope = np.polyfit(np.log(ns[keep]), np.log(values[keep]), 1)[0]
    return float(slope)


def scaling_study(template: RegisterTemplate, n_list,
                  seed: int = 0xD1CE, attenuate: bool = False,
                  tol: float | None = None,
                  parallel: int | None = None) -> ScalingTable:
    """Decay-rate scaling with register size.

    For each N the template is realized with freshly drawn fields and
    the resonance pipeline runs once per channel: the conserving-only
    run gives max_e gamma_e, the exchange-only run gives max_e gamma_e
    and the e = 0 thermalization rate gamma0.  Exponents are log-log
    least-squares fits across the sizes.
    """
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise ValueError("n_list must be nonempty")
    rows = []
    for n in n_list:
        reg = template.realize(n, seed, attenuate=attenuate)
        cons = _gamma_by_frequency(
            dataclasses.replace(reg, lambda2=0.0), tol, parallel)
        exch = _gamma_by_frequency(
            dataclasses.replace(reg, lambda1=0.0), tol, parallel)
        rows.append(ScalingRow(
            n_qubits=n,
            max_gamma_conserving=max(r.gamma for r in cons.values()),
            max_gamma_exchange=max(r.gamma for r in exch.values()),
            gamma0=exch[0.0].gamma))
    ns = [row.n_qubits for row in rows]
    gamma0s = np.array([row.gamma0 for row in rows])
    spread = float((gamma0s.max() - gamma0s.min()) / gamma0s.mean()) \
        if np.all(gamma0s > 0.0) else float("nan")
    return ScalingTable(
        rows=tuple(rows),
        conserving_exponent=_loglog_slope(
            ns, [row.max_gamma_conserving for row in rows]),
        exchange_exponent=_loglog_slope(
            ns, [row.max_gamma_exchange for row in rows]),
        gamma0_spread=spread)
