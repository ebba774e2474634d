"""Three-qubit realisation of the Hardy behaviour family.

Builds the pure state and the one-parameter measurement bases that
reproduce :func:`trihardy.behavior.hardy_behavior` through the Born rule,
plus the closed-form construction of the global maximum of the Hardy
probability.

Conventions
-----------
Computational basis kets are ordered |000>, |001>, ..., |111> with the
first qubit held by party A; outcome +1 corresponds to |0>.  Setting 0 is
measured in the computational basis (observable diag(1, -1)); setting 1 is
measured in a rotated basis

    |u0> = cos(angle/2)|0> + e^{i phase} sin(angle/2)|1>
    |u1> = -sin(angle/2)|0> + e^{i phase} cos(angle/2)|1>

with per-party angles (alpha, beta, gamma) and phases (phi, xi, eta).
The Born probabilities p(a,b,c|x,y,z) = <psi| P_a^x (x) P_b^y (x) P_c^z |psi>
are evaluated as squared inner products against the rank-one projector
eigenvectors, which is the same sandwich written without materialising the
8x8 projector products.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .behavior import Behavior, HardyParams, ParameterError

__all__ = [
    "StateVector",
    "MeasurementAngles",
    "angles_from_params",
    "hardy_state",
    "rotated_basis",
    "party_observables",
    "observable_set",
    "born_behavior",
    "optimal_construction",
    "optimal_params",
    "OPTIMAL_AMPLITUDE_SQUARED",
]

_SIGMA_Z = np.diag([1.0 + 0.0j, -1.0 + 0.0j])


class StateVector:
    """An immutable normalized 8-dimensional complex state vector."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: np.ndarray | Iterable[complex]):
        amp = np.array(amplitudes, dtype=complex, copy=True).reshape(-1)
        if amp.shape != (8,):
            raise ValueError(f"state vector must have 8 amplitudes, got {amp.shape}")
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm^2 = {norm!r} is not 1 within 1e-12")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("StateVector is immutable")

    def as_tensor(self) -> np.ndarray:
        """The amplitudes reshaped to (2, 2, 2), indexed [a_bit, b_bit, c_bit]."""
        return self.amplitudes.reshape(2, 2, 2)

    def to_json(self, fp: IO[str] | None = None) -> str:
        """JSON export: array of 8 [re, im] pairs in |000>..|111> order."""
        doc = {
            "format": "trihardy-state/1",
            "basis_order": "|000>..|111>, first qubit = party A, outcome +1 = |0>",
            "amplitudes": [[z.real, z.imag] for z in self.amplitudes],
        }
        text = json.dumps(doc, indent=2)
        if fp is not None:
            fp.write(text)
        return text

    @classmethod
    def from_json(cls, source: str | IO[str]) -> "StateVector":
        doc = json.loads(source if isinstance(source, str) else source.read())
        return cls([complex(re, im) for re, im in doc["amplitudes"]])

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True)
class MeasurementAngles:
    """Rotation angles and phases of the three setting-1 measurement bases."""

    alpha: float
    beta: float
    gamma: float
    phi: float = 0.0
    xi: float = 0.0
    eta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not 0.0 <= value < math.pi:
                raise ValueError(f"{name} = {value!r} outside [0, pi)")
        for name in ("phi", "xi", "eta"):
            value = getattr(self, name)
            if not 0.0 <= value < 2.0 * math.pi:
                raise ValueError(f"{name} = {value!r} outside [0, 2*pi)")


def _asin_sqrt(arg: float, what: str) -> float:
    """2*asin(sqrt(arg)) with a 1e-12 tolerance band around [0, 1]."""
    if arg < -1e-12 or arg > 1.0 + 1e-12:
        raise ParameterError(f"square-root argument for {what} is {arg!r}, outside [0, 1]")
    return 2.0 * math.asin(math.sqrt(min(max(arg, 0.0), 1.0)))


def angles_from_params(
    params: HardyParams, phases: tuple[float, float, float] = (0.0, 0.0, 0.0)
) -> MeasurementAngles:
    """Measurement angles realising the Hardy behaviour at ``params``.

    alpha = 2 asin sqrt(r s), beta = 2 asin sqrt(r t),
    gamma = 2 asin sqrt(r h / ((1-rs)(1-rt))).  Phases default to zero.
    """
    r, s, t, h = params.r, params.s, params.t, params.h
    alpha = _asin_sqrt(r * s, "alpha")
    beta = _asin_sqrt(r * t, "beta")
    gamma = _asin_sqrt(r * h / ((1.0 - r * s) * (1.0 - r * t)), "gamma")
    return MeasurementAngles(alpha, beta, gamma, *phases)


def hardy_state(
    params: HardyParams, phases: tuple[float, float, float] = (0.0, 0.0, 0.0)
) -> StateVector:
    """The pure three-qubit state of the Hardy family at ``params``.

    With q = 1-r, ds = 1-rs, dt = 1-rt and phases (phi, xi, eta), the
    amplitudes over |abc> are (negative signs on the three single-excitation
    kets):

        |000>:  +sqrt(q r^2 s t h / (ds dt))
        |100>:  -e^{i phi}          sqrt(q r t h / dt)
        |010>:  -e^{i xi}           sqrt(q r s h / ds)
        |001>:  -e^{i eta}          sqrt(q^2 r s t / (ds dt))
        |110>:  +e^{i (phi+xi)}     sqrt(q h)
        |101>:  +e^{i (phi+eta)}    sqrt(q^2 t / dt)
        |011>:  +e^{i (xi+eta)}     sqrt(q^2 s / ds)
        |111>:  +e^{i (phi+xi+eta)} sqrt(r)

    The squared moduli are exactly the (x,y,z) = (0,0,0) row of the
    behaviour table under the outcome map +1 -> |0>.
    """
    r, s, t, h = params.r, params.s, params.t, params.h
    q = 1.0 - r
    ds = 1.0 - r * s
    dt = 1.0 - r * t
    phi, xi, eta = phases

    amp = np.zeros(8, dtype=complex)
    amp[0b000] = math.sqrt(q * r * r * s * t * h / (ds * dt))
    amp[0b100] = -np.exp(1j * phi) * math.sqrt(q * r * t * h / dt)
    amp[0b010] = -np.exp(1j * xi) * math.sqrt(q * r * s * h / ds)
    amp[0b001] = -np.exp(1j * eta) * math.sqrt(q * q * r * s * t / (ds * dt))
    amp[0b110] = np.exp(1j * (phi + xi)) * math.sqrt(q * h)
    amp[0b101] = np.exp(1j * (phi + eta)) * math.sqrt(q * q * t / dt)
    amp[0b011] = np.exp(1j * (xi + eta)) * math.sqrt(q * q * s / ds)
    amp[0b111] = np.exp(1j * (phi + xi + eta)) * math.sqrt(r)
    return StateVector(amp)


def rotated_basis(angle: float, phase: float) -> np.ndarray:
    """Orthonormal eigenbasis of the setting-1 observable, rows = |u0>, |u1>."""
    co = math.cos(angle / 2.0)
    si = math.sin(angle / 2.0)
    ph = np.exp(1j * phase)
    return np.array([[co, ph * si], [-si, ph * co]])


def party_observables(angle: float, phase: float) -> tuple[np.ndarray, np.ndarray]:
    """(setting-0, setting-1) observables for one party.

    Setting 0 is diag(1, -1); setting 1 is |u0><u0| - |u1><u1| built from
    :func:`rotated_basis`.
    """
    u = rotated_basis(angle, phase)
    m1 = np.outer(u[0], u[0].conj()) - np.outer(u[1], u[1].conj())
    return _SIGMA_Z.copy(), m1


def observable_set(
    angles: MeasurementAngles,
) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """((A0, A1), (B0, B1), (C0, C1)) for the given angles."""
    return (
        party_observables(angles.alpha, angles.phi),
        party_observables(angles.beta, angles.xi),
        party_observables(angles.gamma, angles.eta),
    )


def _eigenbases(angles: MeasurementAngles) -> list[list[np.ndarray]]:
    """Per party and setting, the 2x2 matrix whose rows are the +1/-1 eigenvectors."""
    computational = np.eye(2, dtype=complex)
    return [
        [computational, rotated_basis(angles.alpha, angles.phi)],
        [computational, rotated_basis(angles.beta, angles.xi)],
        [computational, rotated_basis(angles.gamma, angles.eta)],
    ]


def born_behavior(state: StateVector, angles: MeasurementAngles) -> Behavior:
    """Born-rule behaviour of ``state`` under the measurement bases of ``angles``."""
    psi = state.as_tensor()
    bases = _eigenbases(angles)
    table = np.empty((2, 2, 2, 2, 2, 2))
    for x in (0, 1):
        ua = bases[0][x].conj()
        for y in (0, 1):
            vb = bases[1][y].conj()
            for z in (0, 1):
                wc = bases[2][z].conj()
                amp = np.einsum("ai,bj,ck,ijk->abc", ua, vb, wc, psi)
                table[x, y, z] = np.abs(amp) ** 2
    return Behavior(table)


def _optimal_amplitude_squared() -> float:
    """|alpha|^2 of the maximal-p_H construction, via the nested radical.

    Closed form ((17+3*sqrt(33))^{2/3} - (17+3*sqrt(33))^{1/3} - 2) /
    (3 (17+3*sqrt(33))^{1/3}); equivalently the real root of
    x^3 + x^2 + x - 1 = 0, which is the form used by the tests as an
    independent oracle.
    """
    u = (17.0 + 3.0 * math.sqrt(33.0)) ** (1.0 / 3.0)
    return (u * u - u - 2.0) / (3.0 * u)


#: |alpha|^2 ~ 0.543689: the common squared amplitude parameter of the
#: maximal-Hardy-probability construction.
OPTIMAL_AMPLITUDE_SQUARED = _optimal_amplitude_squared()


def optimal_params() -> HardyParams:
    """The (r, s, t) of the Hardy-probability maximum: (1 - x^3, x, x).

    Here x = :data:`OPTIMAL_AMPLITUDE_SQUARED`.  That r = 1 - x^3 follows
    from the |111> amplitude of the symmetric optimal state being
    sqrt(1 - x^3); s = t = x follows from the cubic identity
    x + x^2 + x^3 = 1 (the setting-1 single-excitation read-off equals
    1/(1 + x + x^2) = x).
    """
    x = OPTIMAL_AMPLITUDE_SQUARED
    return HardyParams(1.0 - x**3, x, x)


def optimal_construction() -> tuple[StateVector, MeasurementAngles]:
    """Symmetric state and common measurement achieving the maximal p_H.

    The state is c0|000> + c1(|001>+|010>+|100>) + c2(|011>+|101>+|110>)
    + c3|111> with, writing x = |alpha|^2 and taking alpha, beta real
    positive (alpha = sqrt(x), beta = sqrt(1-x)):

        c0 = x^{3/2} (1-x)^{3/2} / sqrt(1-x^3)
        c1 = -x^2 (1-x) / sqrt(1-x^3)
        c2 = x^{5/2} sqrt(1-x) / sqrt(1-x^3)
        c3 = sqrt(1-x^3)

    These are exactly normalized: c0^2 + 3 c1^2 + 3 c2^2 = x^3 by binomial
    collapse, and c3^2 = 1 - x^3.  The common setting-1 observable is
    2 alpha beta sigma_x + (2x - 1) sigma_z, i.e. the rotated basis at
    angle arccos(2x - 1) with zero phase.  The Born behaviour of this
    construction coincides with the Hardy table at r = 1 - x^3, s = t = x.
    """
    x = OPTIMAL_AMPLITUDE_SQUARED
    root = math.sqrt(1.0 - x**3)
    c0 = x**1.5 * (1.0 - x) ** 1.5 / root
    c1 = -(x**2) * (1.0 - x) / root
    c2 = x**2.5 * math.sqrt(1.0 - x) / root
    c3 = root

    amp = np.zeros(8, dtype=complex)
    amp[0b000] = c0
    amp[0b001] = amp[0b010] = amp[0b100] = c1
    amp[0b011] = amp[0b101] = amp[0b110] = c2
    amp[0b111] = c3

    theta = math.acos(2.0 * x - 1.0)
    return StateVector(amp), MeasurementAngles(theta, theta, theta)
