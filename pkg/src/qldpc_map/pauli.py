"""Symplectic Pauli-string algebra.

A Pauli string on ``n`` qubits is stored as two integer bitmasks ``x`` and
``z`` (bit ``q`` set means qubit ``q`` carries an X resp. Z component) plus a
phase exponent ``phase`` so that the operator equals ``i**phase`` times the
tensor product of the Hermitian letters I, X, Y, Z.  Qubit 0 is the leftmost
letter of the string form.

Rotations follow the convention ``P(phi) = exp(-i * phi * P)``, so ``T`` is
``Z(pi/8)`` and ``S`` is ``Z(pi/4)`` up to global phase.  Moving a Clifford
``P(pi/4)`` from the left of a rotation ``Q(phi)`` to its right turns ``Q``
into ``exp(i pi/4 P) Q exp(-i pi/4 P)``, which is ``Q`` when the two commute
and ``i*P*Q`` when they anticommute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}

CLIFFORD = "pi4"
T_GATE = "pi8"
RZ = "rz"
ANGLE_KINDS = (CLIFFORD, T_GATE, RZ)


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Immutable signed Pauli word ``i**phase * P_0 (x) P_1 (x) ... (x) P_{n-1}``."""

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("bitmask exceeds qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse ``"XIZ"``, ``"-XIZ"``, ``"+iY"`` and similar forms."""
        text = text.strip()
        i = 0
        while i < len(text) and text[i] in "+-i":
            i += 1
        prefix, word = text[:i], text[i:]
        if prefix not in _PREFIX_PHASE:
            raise ValueError(f"bad Pauli sign prefix {prefix!r}")
        x = z = 0
        for q, ch in enumerate(word):
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"bad Pauli character {ch!r} at position {q}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(word), x, z, _PREFIX_PHASE[prefix])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        bx, bz = _LETTER_BITS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_letters(cls, n: int, letters: dict[int, str], phase: int = 0) -> "PauliString":
        x = z = 0
        for q, ch in letters.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            bx, bz = _LETTER_BITS[ch]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, phase)

    @property
    def letters(self) -> str:
        return "".join(
            _BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n)
        )

    def letter(self, q: int) -> str:
        return _BITS_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    @property
    def support(self) -> frozenset[int]:
        mask = self.x | self.z
        return frozenset(q for q in range(self.n) if (mask >> q) & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def sign(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, 0)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase + 2)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"


def _check_lengths(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise ValueError(f"Pauli length mismatch: {p.n} vs {q.n}")


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic inner product of ``p`` and ``q`` vanishes."""
    _check_lengths(p, q)
    return _popcount((p.x & q.z) ^ (p.z & q.x)) % 2 == 0


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Operator product ``p @ q`` with the phase tracked exactly.

    >>> str(multiply(PauliString.from_str("X"), PauliString.from_str("Z")))
    '-iY'
    """
    _check_lengths(p, q)
    # Rewrite each factor as i**k X^x Z^z (Y = iXZ), multiply, convert back.
    k = p.phase + _popcount(p.x & p.z) + q.phase + _popcount(q.x & q.z)
    k += 2 * _popcount(p.z & q.x)
    x, z = p.x ^ q.x, p.z ^ q.z
    return PauliString(p.n, x, z, k - _popcount(x & z))


@dataclass(frozen=True)
class PauliRotation:
    """``exp(-i * phi * pauli)`` repeated ``weight`` times.

    ``angle`` is one of ``"pi4"`` (Clifford), ``"pi8"`` (T-type) or ``"rz"``;
    for ``"rz"`` the rotation matches the gate ``Rz(theta)``, i.e.
    ``phi = theta / 2``.  A negative angle is expressed through the sign of
    ``pauli``.
    """

    pauli: PauliString
    angle: str = T_GATE
    theta: float | None = None
    weight: int = 1
    trivial: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.angle not in ANGLE_KINDS:
            raise ValueError(f"unknown angle kind {self.angle!r}")
        if self.angle == RZ and self.theta is None:
            raise ValueError("rz rotations need a theta")
        if self.angle != RZ and self.theta is not None:
            raise ValueError(f"theta only applies to rz rotations, got angle={self.angle}")
        if self.weight < 1:
            raise ValueError("rotation weight must be >= 1")
        if not self.pauli.is_hermitian:
            raise ValueError("rotation axis must carry a real sign")
        if self.pauli.is_identity() and not self.trivial:
            raise ValueError("identity rotation must be marked trivial")

    @property
    def phi(self) -> float:
        if self.angle == CLIFFORD:
            return math.pi / 4
        if self.angle == T_GATE:
            return math.pi / 8
        return self.theta / 2

    @property
    def signed_phi(self) -> float:
        return self.phi if self.pauli.phase == 0 else -self.phi

    @property
    def support(self) -> frozenset[int]:
        return self.pauli.support

    def with_pauli(self, pauli: PauliString) -> "PauliRotation":
        return PauliRotation(pauli, self.angle, self.theta, self.weight, self.trivial)


def conjugate_rotation(clifford: PauliRotation, target: PauliString) -> PauliString:
    """Image of ``target`` when the Clifford ``clifford`` is moved past it.

    Returns ``exp(i pi/4 P) target exp(-i pi/4 P)`` for ``P = clifford.pauli``:
    ``target`` itself if it commutes with ``P``, otherwise ``i * P * target``.
    """
    if clifford.angle != CLIFFORD:
        raise ValueError(f"conjugation needs a pi/4 rotation, got {clifford.angle}")
    if commutes(clifford.pauli, target):
        return target
    return multiply(PauliString(target.n, phase=1), multiply(clifford.pauli, target))


@dataclass(frozen=True)
class PbcCircuit:
    """Non-Clifford rotation layer followed by terminal Pauli measurements."""

    n_qubits: int
    rotations: tuple[PauliRotation, ...] = ()
    measurements: tuple[PauliString, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rotations", tuple(self.rotations))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        for r in self.rotations:
            if r.pauli.n != self.n_qubits:
                raise ValueError(f"rotation {r.pauli} has length {r.pauli.n}, expected {self.n_qubits}")
            if r.angle == CLIFFORD:
                raise ValueError("PBC circuits may not contain pi/4 rotations")
        for m in self.measurements:
            if m.n != self.n_qubits:
                raise ValueError(f"measurement {m} has length {m.n}, expected {self.n_qubits}")

    @property
    def total_weight(self) -> int:
        return sum(r.weight for r in self.rotations)

    def __len__(self) -> int:
        return len(self.rotations)
