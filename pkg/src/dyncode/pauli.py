"""
Phaseless n-qubit Pauli operators in the binary symplectic picture.

An operator is a pair of n-bit masks (x_mask, z_mask): qubit i carries
X iff only x_mask has bit i, Z iff only z_mask, Y iff both, I iff neither.
Group multiplication is bitwise XOR of the masks, so every operator is its
own inverse.  All +/-1 sign bookkeeping is deliberately kept out of this
module and lives in outcome expressions instead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PauliOperator:
    """A phaseless Pauli operator on ``n`` qubits."""

    n: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits outside the qubit range")

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def __str__(self) -> str:
        return format_pauli(self)


def identity(n: int) -> PauliOperator:
    """The identity operator on ``n`` qubits."""
    return PauliOperator(n, 0, 0)


_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_CHAR = {v: k for k, v in _CHAR_TO_BITS.items()}


def parse_pauli(text: str, n: int) -> PauliOperator:
    """Parse a Pauli operator from text.

    Two grammars are accepted:

    * dense: ``"XIZY..."``, exactly ``n`` characters from ``IXYZ``;
    * sparse: whitespace-separated tokens like ``"X1 Z3 Y7"`` with 1-based
      qubit indices (at most one letter per qubit).

    Sign prefixes are rejected; operators are phaseless by construction.

    Args:
        text: The operator in either grammar.  The empty string or ``"I"``
            denotes the identity in sparse form.
        n: Qubit count of the resulting operator.

    Returns:
        The corresponding :class:`PauliOperator`.

    Raises:
        ValueError: on malformed characters, out-of-range indices,
            duplicate sparse indices, or a sign prefix.
    """
    stripped = text.strip()
    if stripped.startswith(("+", "-")):
        raise ValueError(f"sign prefixes are not permitted: {text!r}")
    tokens = stripped.split()
    if not tokens or (len(tokens) == 1 and tokens[0] == "I" and n != 1):
        return identity(n)
    if len(tokens) == 1 and not any(ch.isdigit() for ch in tokens[0]):
        dense = tokens[0]
        if len(dense) != n:
            raise ValueError(
                f"dense Pauli string has length {len(dense)}, expected {n}: {text!r}"
            )
        x_mask = z_mask = 0
        for i, ch in enumerate(dense):
            if ch not in _CHAR_TO_BITS:
                raise ValueError(f"invalid Pauli character {ch!r} in {text!r}")
            xb, zb = _CHAR_TO_BITS[ch]
            x_mask |= xb << i
            z_mask |= zb << i
        return PauliOperator(n, x_mask, z_mask)

    x_mask = z_mask = 0
    seen: set[int] = set()
    for token in tokens:
        letter, digits = token[0].upper(), token[1:]
        if letter not in "XYZ" or not digits.isdigit():
            raise ValueError(f"invalid sparse Pauli token {token!r} in {text!r}")
        index = int(digits)
        if not 1 <= index <= n:
            raise ValueError(f"qubit index {index} out of range 1..{n} in {text!r}")
        if index in seen:
            raise ValueError(f"duplicate qubit index {index} in {text!r}")
        seen.add(index)
        xb, zb = _CHAR_TO_BITS[letter]
        x_mask |= xb << (index - 1)
        z_mask |= zb << (index - 1)
    return PauliOperator(n, x_mask, z_mask)


def format_pauli(op: PauliOperator) -> str:
    """Render an operator in the canonical dense form (``"XIZY..."``)."""
    chars = []
    for i in range(op.n):
        bits = ((op.x_mask >> i) & 1, (op.z_mask >> i) & 1)
        chars.append(_BITS_TO_CHAR[bits])
    return "".join(chars)


def product(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Phaseless product of two operators (bitwise XOR of the masks)."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n} qubits")
    return PauliOperator(a.n, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """Symplectic inner product; 1 iff the operators anticommute."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n} qubits")
    return ((a.x_mask & b.z_mask).bit_count() + (a.z_mask & b.x_mask).bit_count()) & 1


def weight(op: PauliOperator) -> int:
    """Number of qubits on which the operator acts non-trivially."""
    return (op.x_mask | op.z_mask).bit_count()


def encode(op: PauliOperator) -> int:
    """Pack an operator into a 2n-bit row vector (x block low, z block high)."""
    return op.x_mask | (op.z_mask << op.n)


def decode(vec: int, n: int) -> PauliOperator:
    """Inverse of :func:`encode`."""
    mask = (1 << n) - 1
    return PauliOperator(n, vec & mask, (vec >> n) & mask)


def symplectic_partner(vec: int, n: int) -> int:
    """Swap the x and z blocks of a 2n-bit row vector.

    ``parity(a & symplectic_partner(b, n))`` equals the symplectic product
    of the operators encoded by ``a`` and ``b``.
    """
    mask = (1 << n) - 1
    return ((vec & mask) << n) | (vec >> n)
