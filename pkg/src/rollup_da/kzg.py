"""Polynomial commitments: setup, commit, open, eval, verify-eval.

All five operations are pure functions of their inputs; the structured
reference string is immutable and shareable.  The verification equation is
checked in the rearranged form e(C * g^-y, g) == e(w, g^alpha * g^-i),
which is algebraically the same as dividing inside the pairing but needs
only a group inversion.
"""

from dataclasses import dataclass
from typing import Optional

KZG_MAGIC = b"KSR1"


class DegreeZeroError(ValueError):
    """Setup asked for a reference string that cannot hold degree >= 1."""


class DegreeTooLargeError(ValueError):
    """Polynomial degree exceeds the reference string."""


@dataclass(frozen=True, eq=False)
class Srs:
    """Reference string (g, g^alpha, ..., g^alpha^D).

    A backend flagged insecure retains alpha so oracle tests can compute
    expected exponents directly; otherwise alpha is erased at setup.
    Equality ignores alpha and compares backends by name so that a
    deserialized reference string equals the one that produced it.
    """
    backend: object
    powers: tuple
    max_degree: int
    alpha: Optional[int] = None

    def __eq__(self, other):
        if not isinstance(other, Srs):
            return NotImplemented
        return (self.backend.name == other.backend.name
                and self.powers == other.powers
                and self.max_degree == other.max_degree)


@dataclass(frozen=True)
class Commitment:
    point: object


@dataclass(frozen=True)
class EvalProof:
    index: int
    value: int
    witness: object


def kzg_setup(backend, max_degree, rng):
    """Sample alpha and materialize the power sequence.

    The backend stands in for the security parameter: it fixes the group,
    its order, and therefore the hardness of recovering alpha.
    """
    if max_degree < 1:
        raise DegreeZeroError("max_degree must be >= 1")
    alpha = rng.randrange(1, backend.order)
    g = backend.generator()
    powers = [g]
    acc = 1
    for _ in range(max_degree):
        acc = acc * alpha % backend.order
        powers.append(backend.mul(g, acc))
    backend.precompute(powers)  # every commit multiplies these same bases
    return Srs(
        backend=backend,
        powers=tuple(powers),
        max_degree=max_degree,
        alpha=alpha if backend.insecure else None,
    )


def _check_degree(srs, coeffs):
    if len(coeffs) - 1 > srs.max_degree:
        raise DegreeTooLargeError(
            "degree %d exceeds srs degree %d" % (len(coeffs) - 1, srs.max_degree))


def kzg_commit(srs, coeffs):
    """C = prod (g^alpha^i)^phi_i = g^phi(alpha)."""
    coeffs = srs.backend.field.poly_trim(coeffs)
    _check_degree(srs, coeffs)
    return Commitment(srs.backend.msm(coeffs, srs.powers[:len(coeffs)]))


def kzg_open(srs, commitment, coeffs):
    """True iff the commitment recomputes from the claimed polynomial."""
    coeffs = srs.backend.field.poly_trim(coeffs)
    _check_degree(srs, coeffs)
    return kzg_commit(srs, coeffs) == commitment


def kzg_eval(srs, coeffs, i):
    """Evaluate at i and commit to the quotient as the witness."""
    field = srs.backend.field
    coeffs = field.poly_trim(coeffs)
    _check_degree(srs, coeffs)
    value = field.poly_eval(coeffs, i)
    quotient = field.poly_div_linear(coeffs, i)
    witness = srs.backend.msm(quotient, srs.powers[:len(quotient)])
    return EvalProof(index=i % srs.backend.order, value=value, witness=witness)


def kzg_verify_eval(srs, commitment, i, y, witness):
    """Check e(C * g^-y, g) == e(witness, g^alpha * g^-i)."""
    be = srs.backend
    g = be.generator()
    lhs_pt = be.add(commitment.point, be.mul(g, -y))
    rhs_pt = be.add(srs.powers[1], be.mul(g, -i))
    return be.pairing(lhs_pt, g) == be.pairing(witness, rhs_pt)


def serialize_srs(srs):
    """Versioned binary form: magic, backend tag, degree, element list."""
    be = srs.backend
    tag = be.name.encode()
    out = [KZG_MAGIC, bytes([len(tag)]), tag, srs.max_degree.to_bytes(4, "big"),
           len(srs.powers).to_bytes(4, "big")]
    for p in srs.powers:
        out.append(be.element_to_bytes(p))
    return b"".join(out)


def deserialize_srs(data, backend):
    """Parse a reference string; alpha is never carried by the wire form."""
    if data[:4] != KZG_MAGIC:
        raise ValueError("bad srs magic")
    off = 4
    taglen = data[off]
    off += 1
    tag = data[off:off + taglen].decode()
    off += taglen
    if tag != backend.name:
        raise ValueError("srs was produced by backend %r, not %r" % (tag, backend.name))
    max_degree = int.from_bytes(data[off:off + 4], "big")
    off += 4
    count = int.from_bytes(data[off:off + 4], "big")
    off += 4
    size = backend.element_size
    if len(data) != off + count * size:
        raise ValueError("truncated srs")
    powers = []
    for j in range(count):
        powers.append(backend.element_from_bytes(data[off + j * size:off + (j + 1) * size]))
    backend.precompute(powers)
    return Srs(backend=backend, powers=tuple(powers), max_degree=max_degree)
