"""Proof of download: partition a payload, digest the parts, interpolate,
commit.  The resulting commitment is the hidden state a block producer must
place in a batch header, and it cannot be computed without the payload.
"""

import hashlib
from dataclasses import dataclass

from .kzg import Commitment, Srs, kzg_setup, kzg_commit, kzg_open

# the hidden state is exactly a commitment to the digest polynomial
HiddenState = Commitment


class EmptyPayloadError(ValueError):
    pass


class KTooLargeError(ValueError):
    pass


class DegreeZeroPartsError(ValueError):
    pass


class HashSuite:
    """Four domain-separated hashes into Z_p.

    Multi-input calls are framed with 8-byte length prefixes so that the
    concatenation convention is unambiguous and order-sensitive.  Digests
    are 512 bits before reduction, which keeps the mod-p bias negligible
    even for a 255-bit modulus.  Subclass and override for test-injectable
    hand values.
    """

    def __init__(self, modulus):
        self.modulus = modulus

    def _digest(self, tag, parts):
        h = hashlib.sha512(tag)
        for part in parts:
            h.update(len(part).to_bytes(8, "big"))
            h.update(part)
        return int.from_bytes(h.digest(), "big") % self.modulus

    def _scalar_bytes(self, v):
        width = (self.modulus.bit_length() + 7) // 8
        return int(v).to_bytes(width, "big")

    def h1(self, data):
        return self._digest(b"rollup-da/h1", (data,))

    def h2(self, challenge, data):
        return self._digest(b"rollup-da/h2", (self._scalar_bytes(challenge), data))

    def h3(self, data):
        return self._digest(b"rollup-da/h3", (data,))

    def h4(self, data):
        return self._digest(b"rollup-da/h4", (data,))


@dataclass(frozen=True)
class PodKeys:
    pk: Srs
    vk: Srs  # same reference string on both sides


def pod_setup(backend, max_parts, rng):
    """Reference string sized for up to max_parts digest points."""
    if max_parts < 2:
        raise DegreeZeroPartsError("need room for at least 2 parts")
    srs = kzg_setup(backend, max_parts, rng)
    return PodKeys(pk=srs, vk=srs)


def partition(payload, k):
    """Split into k parts; the first parts get ceil(len/k) bytes each.

    Concatenating the parts always reproduces the payload.  When k does not
    divide the length, trailing parts can be shorter (possibly empty); the
    raw bytes are hashed with no padding.
    """
    if not payload:
        raise EmptyPayloadError("cannot partition an empty payload")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(payload):
        raise KTooLargeError("k=%d exceeds payload length %d" % (k, len(payload)))
    size = -(-len(payload) // k)
    return [payload[j * size:(j + 1) * size] for j in range(k)]


def _part_digest(suite, part, j, bind_index):
    if bind_index:
        # optional strengthening: fold the part index in as associated data
        return suite.h1(j.to_bytes(8, "big") + part)
    return suite.h1(part)


def digest_polynomial(field, suite, payload, k, bind_index=False):
    """Interpolate phi with phi(j) = H1(part_j) on nodes 0..k-1."""
    parts = partition(payload, k)
    points = [(j, _part_digest(suite, parts[j], j, bind_index)) for j in range(k)]
    return field.interpolate(points)


def pod_prove(keys, payload, k, suite, bind_index=False):
    if not 2 <= k <= keys.pk.max_degree + 1:
        raise ValueError("k must be in [2, %d]" % (keys.pk.max_degree + 1))
    phi = digest_polynomial(keys.pk.backend.field, suite, payload, k, bind_index)
    return kzg_commit(keys.pk, phi)


def pod_verify(keys, hidden_state, payload, k, suite, bind_index=False):
    if not 2 <= k <= keys.vk.max_degree + 1:
        raise ValueError("k must be in [2, %d]" % (keys.vk.max_degree + 1))
    phi = digest_polynomial(keys.vk.backend.field, suite, payload, k, bind_index)
    return kzg_open(keys.vk, hidden_state, phi)


def frame_payloads(payloads):
    """Length-prefixed concatenation for the multi-batch hidden state."""
    out = []
    for p in payloads:
        out.append(len(p).to_bytes(8, "big"))
        out.append(p)
    return b"".join(out)


def pod_prove_multi(keys, payloads, k, suite, bind_index=False):
    """Hidden state over several batches at once.

    Equivalent to pod_prove over the framed concatenation, so the result is
    order-sensitive in the payload sequence.  A single-payload sequence
    degenerates to the plain single-batch hidden state, keeping the multi
    form a strict generalization.
    """
    if not payloads:
        raise EmptyPayloadError("no payloads")
    if len(payloads) == 1:
        return pod_prove(keys, payloads[0], k, suite, bind_index)
    return pod_prove(keys, frame_payloads(payloads), k, suite, bind_index)


def pod_verify_multi(keys, hidden_state, payloads, k, suite, bind_index=False):
    if not payloads:
        raise EmptyPayloadError("no payloads")
    if len(payloads) == 1:
        return pod_verify(keys, hidden_state, payloads[0], k, suite, bind_index)
    return pod_verify(keys, hidden_state, frame_payloads(payloads), k, suite, bind_index)
