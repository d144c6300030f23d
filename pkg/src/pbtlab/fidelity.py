"""Direct-trace fidelity evaluation and measurement comparisons.

The entanglement fidelity of the port-selection protocol is
F = (1/4) sum_i tr(Pi_i eta_i); the average teleportation fidelity follows
as f = (2F + 1)/3.  Everything here works from explicit operators, so it
serves as the numerical cross-check of the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import closedform
from .ensemble import (
    PSI_MINUS,
    PSI_PLUS,
    DephasingParams,
    SignalEnsemble,
    _embed_pair_block,
)
from .linops import HermitianOp, LinopsError, trace_norm
from .povm import Povm, noiseless_povm, pgm

IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class FidelityResult:
    n_ports: int
    params: DephasingParams
    povm_source: str
    ent_fidelity: float
    teleport_fidelity: float
    per_port_traces: tuple


def _real_trace(a: np.ndarray, b: np.ndarray) -> float:
    """tr(ab) for Hermitian a, b with a check on the imaginary residue."""
    val = np.einsum("ij,ji->", a, b)
    if abs(val.imag) > IMAG_RESIDUE_TOL * max(abs(val.real), 1.0):
        raise LinopsError(f"trace has imaginary residue {val.imag:.3e}")
    return float(val.real)


def ent_fidelity(povm: Povm, ensemble: SignalEnsemble) -> FidelityResult:
    """Entanglement fidelity of a measurement against a signal ensemble."""
    if povm.n != ensemble.n_ports:
        raise LinopsError(
            f"POVM has {povm.n} elements but ensemble has {ensemble.n_ports} ports"
        )
    if povm.dim != ensemble.average_unnormalized.dim:
        raise LinopsError("POVM and ensemble dimensions do not match")
    traces = tuple(
        _real_trace(e.matrix, st.matrix)
        for e, st in zip(povm.elements, ensemble.states)
    )
    f = 0.25 * sum(traces)
    return FidelityResult(
        ensemble.n_ports,
        ensemble.params,
        povm.source,
        f,
        closedform.teleport_fidelity(f),
        traces,
    )


def mixed_term(povm: Povm, port: int, n: int) -> float:
    """Magnitude of the cross-term trace tr(Pi_port K_port).

    K_port is the anti-Hermitian Bell cross operator
    (|psi+><psi-| - |psi-><psi+|) on (A_port, B), maximally mixed elsewhere.
    For the PGM of the ideal ensemble this vanishes identically.
    """
    cross = np.outer(PSI_PLUS, PSI_MINUS.conj()) - np.outer(PSI_MINUS, PSI_PLUS.conj())
    # embed the Hermitian operator i*K so the layout machinery applies
    embedded = _embed_pair_block(1j * cross, port, n)
    val = np.einsum("ij,ji->", povm.elements[port - 1].matrix, embedded.matrix)
    return float(abs(val))


@dataclass(frozen=True)
class ComparisonRow:
    gamma_abs: float
    noiseless: float
    noise_adapted: float
    beigi_konig: float
    helstrom: float | None


def compare_noise_adapted(n: int, gamma_grid: Sequence[float]) -> list:
    """Noiseless vs noise-adapted PGM fidelities at theta = 0, with bounds."""
    base = noiseless_povm(n)
    rows = []
    for g in gamma_grid:
        params = DephasingParams(float(g), 0.0)
        ens = SignalEnsemble.build(n, params)
        f_fixed = ent_fidelity(base, ens).ent_fidelity
        f_adapt = ent_fidelity(pgm(ens), ens).ent_fidelity
        hel = closedform.helstrom_bound_n2(float(g)) if n == 2 else None
        rows.append(
            ComparisonRow(
                float(g),
                f_fixed,
                f_adapt,
                closedform.beigi_konig_bound(n, float(g)),
                hel,
            )
        )
    return rows


def helstrom_optimal_n2(ensemble: SignalEnsemble) -> float:
    """Optimal two-state discrimination fidelity F = (N/4) P_succ at N = 2."""
    if ensemble.n_ports != 2:
        raise LinopsError(f"Helstrom evaluation needs 2 states, got {ensemble.n_ports}")
    a, b = ensemble.states
    diff = HermitianOp(a.matrix - b.matrix, a.n_qubits)
    p_succ = 0.5 + 0.25 * trace_norm(diff)
    return 0.5 * p_succ
