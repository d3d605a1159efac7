"""Sparse two-photon states over the (polarization x OAM) space of two arms.

A joint state lives on arm A tensor arm B, where each arm carries a
polarization qubit and an unbounded (but finitely supported) orbital
angular momentum index.  States are sparse complex amplitude maps keyed by
integer-coded labels; operations are pure functions returning new values,
so everything here is safe to share across threads.

Conventions, pinned once and regression-locked by the test suite:

    polarization basis   H = 0, V = 1
    diagonal             D = (H + V)/sqrt(2),  A = (H - V)/sqrt(2)
    circular             R = (H - iV)/sqrt(2), L = (H + iV)/sqrt(2)

State equality in tests always means equality up to one global phase,
checked through ``abs(state_overlap(a, b)) == 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

POL_H = 0
POL_V = 1
POL_NAMES = ("H", "V")

ARMS = ("A", "B")

#: Hard guard against runaway OAM shifts (e.g. a q-plate applied in a loop).
L_CAP = 32

#: Amplitudes below this magnitude are dropped after every public operation.
PRUNE_TOL = 1e-15

#: Projection probabilities below this count as a null outcome.
NULL_TOL = 1e-14

_NORM_TOL = 1e-9


class OamOverflowError(ValueError):
    """An operation pushed an OAM index beyond the configured cap."""


def _check_finite(amplitudes: Mapping) -> None:
    for amp in amplitudes.values():
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError("non-finite amplitude")


# ---------------------------------------------------------------------------
# single-arm states


@dataclass(frozen=True)
class LocalKet:
    """State of one arm: amplitudes keyed by ``(polarization, oam)``."""

    amplitudes: dict

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))


def local_ket(amplitudes: Mapping, normalize: bool = True) -> LocalKet:
    amps = {k: complex(v) for k, v in amplitudes.items() if abs(v) > 0.0}
    _check_finite(amps)
    if not amps:
        raise ValueError("empty local state")
    if normalize:
        n = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
        amps = {k: a / n for k, a in amps.items()}
    return LocalKet(amps)


def basis_ket(pol: int, ell: int = 0) -> LocalKet:
    return LocalKet({(pol, ell): 1.0 + 0.0j})


_POL_STATES = {
    "H": {POL_H: 1.0},
    "V": {POL_V: 1.0},
    "D": {POL_H: 1 / math.sqrt(2), POL_V: 1 / math.sqrt(2)},
    "A": {POL_H: 1 / math.sqrt(2), POL_V: -1 / math.sqrt(2)},
    "R": {POL_H: 1 / math.sqrt(2), POL_V: -1j / math.sqrt(2)},
    "L": {POL_H: 1 / math.sqrt(2), POL_V: 1j / math.sqrt(2)},
}


def polarization_ket(name: str, ell: int = 0) -> LocalKet:
    """One of H, V, D, A, R, L at a fixed OAM index."""
    try:
        coeffs = _POL_STATES[name]
    except KeyError:
        raise ValueError(f"unknown polarization label {name!r}") from None
    return LocalKet({(pol, ell): complex(c) for pol, c in coeffs.items()})


# ---------------------------------------------------------------------------
# joint states


@dataclass(frozen=True)
class JointKet:
    """Two-photon state.

    ``amplitudes`` maps ``(pol_a, ell_a, pol_b, ell_b)`` to a complex
    amplitude.  ``norm_tracked`` accumulates the success probability of
    every non-unitary step (polarizer, fiber, hologram) applied so far;
    the amplitudes themselves always stay normalized.
    """

    amplitudes: dict
    norm_tracked: float = 1.0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def support_ells(self, arm: str) -> tuple:
        idx = 1 if arm == "A" else 3
        return tuple(sorted({k[idx] for k in self.amplitudes}))


def _prune(amps: dict) -> dict:
    return {k: a for k, a in amps.items() if abs(a) >= PRUNE_TOL}


def joint_ket(amplitudes: Mapping, norm_tracked: float = 1.0) -> JointKet:
    """Build a normalized joint state from an amplitude map."""
    amps = {tuple(k): complex(v) for k, v in amplitudes.items()}
    _check_finite(amps)
    for (_, ell_a, _, ell_b) in amps:
        if abs(ell_a) > L_CAP or abs(ell_b) > L_CAP:
            raise OamOverflowError("OAM support overflow")
    n = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    if n < NULL_TOL:
        raise ValueError("cannot normalize a null state")
    amps = _prune({k: a / n for k, a in amps.items()})
    return JointKet(amps, min(max(norm_tracked, 0.0), 1.0))


def tensor(ket_a: LocalKet, ket_b: LocalKet) -> JointKet:
    """Product state of two single-arm states; factors must be normalized."""
    for ket in (ket_a, ket_b):
        if abs(ket.norm() - 1.0) > _NORM_TOL:
            raise ValueError("unnormalized factor")
    amps = {}
    for (pol_a, ell_a), va in ket_a.amplitudes.items():
        for (pol_b, ell_b), vb in ket_b.amplitudes.items():
            amps[(pol_a, ell_a, pol_b, ell_b)] = va * vb
    return joint_ket(amps)


def state_overlap(a: JointKet, b: JointKet) -> complex:
    """Inner product <a|b> over the shared support."""
    small, large = (a, b) if len(a.amplitudes) <= len(b.amplitudes) else (b, a)
    acc = 0.0 + 0.0j
    for k, amp in small.amplitudes.items():
        other = large.amplitudes.get(k)
        if other is not None:
            acc += (amp.conjugate() * other) if small is a else (other.conjugate() * amp)
    return acc


# ---------------------------------------------------------------------------
# single-arm operators


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Sparse operator on one arm's (polarization x OAM) space.

    ``entries`` maps ``((pol_out, ell_out), (pol_in, ell_in))`` to the
    matrix element.  Labels absent from all input columns are annihilated,
    which is the physical behaviour of the post-selecting elements
    (fiber, hologram); unitaries are compiled with full columns.
    """

    entries: dict
    unitary: bool = False
    _columns: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        cols: dict = {}
        for (out_lbl, in_lbl), amp in self.entries.items():
            cols.setdefault(in_lbl, []).append((out_lbl, complex(amp)))
        object.__setattr__(self, "_columns", cols)
        if self.unitary:
            self._check_unitary()

    def _check_unitary(self, tol: float = 1e-10) -> None:
        # O†O restricted to the declared input support must be the identity.
        rows: dict = {}
        for (out_lbl, in_lbl), amp in self.entries.items():
            rows.setdefault(out_lbl, []).append((in_lbl, complex(amp)))
        gram: dict = {}
        for row in rows.values():
            for in_i, a_i in row:
                for in_j, a_j in row:
                    key = (in_i, in_j)
                    gram[key] = gram.get(key, 0.0 + 0.0j) + a_i.conjugate() * a_j
        for (in_i, in_j), val in gram.items():
            want = 1.0 if in_i == in_j else 0.0
            if abs(val - want) > tol:
                raise ValueError("operator flagged unitary is not unitary")


def local_operator(entries: Mapping, unitary: bool = False) -> LocalOperator:
    return LocalOperator({k: complex(v) for k, v in entries.items()}, unitary)


def identity_operator(ells: Iterable[int]) -> LocalOperator:
    entries = {}
    for ell in ells:
        for pol in (POL_H, POL_V):
            entries[((pol, ell), (pol, ell))] = 1.0
    return LocalOperator(entries, unitary=True)


def compose(second: LocalOperator, first: LocalOperator) -> LocalOperator:
    """Operator product ``second @ first``."""
    entries: dict = {}
    for (mid_lbl, in_lbl), a1 in first.entries.items():
        for out_lbl, a2 in second._columns.get(mid_lbl, ()):  # noqa: SLF001
            key = (out_lbl, in_lbl)
            entries[key] = entries.get(key, 0.0 + 0.0j) + a2 * a1
    entries = {k: v for k, v in entries.items() if abs(v) >= PRUNE_TOL}
    return LocalOperator(entries, unitary=second.unitary and first.unitary)


def apply_local(op: LocalOperator, arm: str, state: JointKet,
                l_cap: int = L_CAP) -> JointKet:
    """Apply an operator to one arm, leaving the other arm untouched.

    Unitary operators preserve the norm; non-unitary ones generally do
    not, and callers that post-select should go through
    :func:`postselect_local` to renormalize and track the probability.
    """
    if arm not in ARMS:
        raise ValueError(f"unknown arm {arm!r}")
    out: dict = {}
    for key, amp in state.amplitudes.items():
        if arm == "A":
            local_in, rest = (key[0], key[1]), (key[2], key[3])
        else:
            local_in, rest = (key[2], key[3]), (key[0], key[1])
        for (pol_out, ell_out), mat in op._columns.get(local_in, ()):  # noqa: SLF001
            if abs(ell_out) > l_cap:
                raise OamOverflowError("OAM support overflow")
            if arm == "A":
                new_key = (pol_out, ell_out, rest[0], rest[1])
            else:
                new_key = (rest[0], rest[1], pol_out, ell_out)
            out[new_key] = out.get(new_key, 0.0 + 0.0j) + mat * amp
    return JointKet(_prune(out), state.norm_tracked)


def postselect_local(op: LocalOperator, arm: str, state: JointKet,
                     l_cap: int = L_CAP):
    """Apply a non-unitary element and renormalize.

    Returns ``(state, probability)`` where the probability is the squared
    norm of the unnormalized result; a probability below ``NULL_TOL``
    yields ``(None, 0.0)`` (the null outcome).
    """
    raw = apply_local(op, arm, state, l_cap)
    p = sum(abs(a) ** 2 for a in raw.amplitudes.values())
    if p < NULL_TOL:
        return None, 0.0
    scale = 1.0 / math.sqrt(p)
    amps = _prune({k: a * scale for k, a in raw.amplitudes.items()})
    return JointKet(amps, min(state.norm_tracked * p, 1.0)), p


def project(state: JointKet, arm: str, target: LocalKet):
    """Born-rule projection of one arm onto a normalized local state.

    Returns ``(post_state, probability)``; the post-measurement state is
    renormalized, with the projected arm collapsed onto ``target``.  A
    probability below ``NULL_TOL`` returns ``(None, 0.0)``.
    """
    if abs(target.norm() - 1.0) > _NORM_TOL:
        raise ValueError("unnormalized projection target")
    if arm not in ARMS:
        raise ValueError(f"unknown arm {arm!r}")
    residual: dict = {}
    for key, amp in state.amplitudes.items():
        if arm == "A":
            local_lbl, rest = (key[0], key[1]), (key[2], key[3])
        else:
            local_lbl, rest = (key[2], key[3]), (key[0], key[1])
        t = target.amplitudes.get(local_lbl)
        if t is not None:
            residual[rest] = residual.get(rest, 0.0 + 0.0j) + t.conjugate() * amp
    p = sum(abs(a) ** 2 for a in residual.values())
    if p < NULL_TOL:
        return None, 0.0
    scale = 1.0 / math.sqrt(p)
    amps: dict = {}
    for local_lbl, t in target.amplitudes.items():
        for rest, r in residual.items():
            if arm == "A":
                key = (local_lbl[0], local_lbl[1], rest[0], rest[1])
            else:
                key = (rest[0], rest[1], local_lbl[0], local_lbl[1])
            amps[key] = t * r * scale
    return JointKet(_prune(amps), min(state.norm_tracked * p, 1.0)), p


# ---------------------------------------------------------------------------
# density matrices (dense oracle for the sparse pipeline)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense Hermitian matrix over an explicitly ordered basis."""

    basis: tuple
    matrix: np.ndarray

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def density_matrix(basis: Sequence, matrix: np.ndarray,
                   validate: bool = True) -> DensityMatrix:
    mat = np.asarray(matrix, dtype=complex)
    if mat.shape != (len(basis), len(basis)):
        raise ValueError("basis/matrix dimension mismatch")
    if validate:
        if not np.all(np.isfinite(mat)):
            raise ValueError("non-finite density matrix")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > 1e-12:
            raise ValueError("density matrix trace is not 1")
        if np.min(np.linalg.eigvalsh(mat)) < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
    return DensityMatrix(tuple(basis), mat)


def _label_slot(key: tuple, arm: str, dof: str):
    pol, ell = (key[0], key[1]) if arm == "A" else (key[2], key[3])
    if dof == "both":
        return (pol, ell)
    if dof == "pol":
        return (pol,)
    if dof == "oam":
        return (ell,)
    raise ValueError(f"unknown degree-of-freedom selector {dof!r}")


def reduced_density(state: JointKet, arm: str, dof: str = "both",
                    basis: Sequence | None = None) -> DensityMatrix:
    """Partial trace down to one arm (optionally one degree of freedom)."""
    if arm not in ARMS:
        raise ValueError("empty or unknown arm selector")
    if abs(state.norm() - 1.0) > _NORM_TOL:
        raise ValueError("state must be normalized")
    kept: dict = {}
    for key, amp in state.amplitudes.items():
        slot = _label_slot(key, arm, dof)
        other_arm = "B" if arm == "A" else "A"
        opol, oell = (key[0], key[1]) if other_arm == "A" else (key[2], key[3])
        # trace over the other arm entirely, and over the unselected dof
        traced = (opol, oell)
        if dof == "pol":
            traced = traced + (key[1] if arm == "A" else key[3],)
        elif dof == "oam":
            traced = traced + (key[0] if arm == "A" else key[2],)
        group = kept.setdefault(traced, {})
        group[slot] = group.get(slot, 0.0 + 0.0j) + amp
    if basis is None:
        labels = sorted({slot for group in kept.values() for slot in group})
    else:
        labels = list(basis)
    index = {lbl: i for i, lbl in enumerate(labels)}
    mat = np.zeros((len(labels), len(labels)), dtype=complex)
    for group in kept.values():
        for slot_i, a_i in group.items():
            for slot_j, a_j in group.items():
                mat[index[slot_i], index[slot_j]] += a_i * a_j.conjugate()
    return density_matrix(labels, mat)


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Half the trace norm of the difference; 0 for equal, 1 for orthogonal."""
    if rho1.basis != rho2.basis:
        raise ValueError("density matrices live on different bases")
    eigs = np.linalg.eigvalsh(rho1.matrix - rho2.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


# ---------------------------------------------------------------------------
# dense helpers shared with the channel-composition oracle


def joint_basis(l_bound: int) -> tuple:
    """All joint labels with both OAM indices inside ``[-l_bound, l_bound]``."""
    ells = range(-l_bound, l_bound + 1)
    return tuple(
        (pa, ea, pb, eb)
        for pa in (POL_H, POL_V) for ea in ells
        for pb in (POL_H, POL_V) for eb in ells
    )


def state_vector(state: JointKet, basis: Sequence) -> np.ndarray:
    index = {lbl: i for i, lbl in enumerate(basis)}
    vec = np.zeros(len(basis), dtype=complex)
    for key, amp in state.amplitudes.items():
        vec[index[key]] = amp
    return vec


def operator_matrix(op: LocalOperator, arm: str, basis: Sequence) -> np.ndarray:
    """Dense joint-space matrix of a single-arm operator on ``basis``."""
    index = {lbl: i for i, lbl in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for key in basis:
        if arm == "A":
            local_in, rest = (key[0], key[1]), (key[2], key[3])
        else:
            local_in, rest = (key[2], key[3]), (key[0], key[1])
        for (pol_out, ell_out), amp in op._columns.get(local_in, ()):  # noqa: SLF001
            if arm == "A":
                out_key = (pol_out, ell_out, rest[0], rest[1])
            else:
                out_key = (rest[0], rest[1], pol_out, ell_out)
            if out_key in index:
                mat[index[out_key], index[key]] += amp
    return mat


def density_of(state: JointKet, basis: Sequence) -> np.ndarray:
    vec = state_vector(state, basis)
    return np.outer(vec, vec.conj())


def phase_factor(z: complex) -> complex:
    return cmath.exp(1j * cmath.phase(z))


def format_state(state: JointKet, digits: int = 4) -> str:
    """Readable ket expansion, one term per line, largest first."""
    lines = []
    items = sorted(state.amplitudes.items(), key=lambda kv: -abs(kv[1]))
    for (pa, ea, pb, eb), amp in items:
        mag, ph = abs(amp), cmath.phase(amp)
        lines.append(
            f"  {mag:.{digits}f} exp({ph:+.{digits}f}i) "
            f"|{POL_NAMES[pa]},{ea:+d}>_A |{POL_NAMES[pb]},{eb:+d}>_B")
    return "\n".join(lines)
