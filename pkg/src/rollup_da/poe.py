"""Proof of existence: challenge, response, verification.

A response proves two things about a stored part: that its digest opens
the recorded hidden state at the part's index (evaluation proof), and that
the responder knows bytes hashing to that digest under a binding value
derived from the fresh challenge (relation proof).  The relation-proof
system is pluggable; the reference backend simply reveals the part, which
is complete and sound but neither succinct nor zero-knowledge.
"""

from dataclasses import dataclass

from .kzg import Srs, kzg_verify_eval


@dataclass(frozen=True)
class ChallengeRequest:
    batch_index: int
    challenge: int  # uniform scalar


@dataclass(frozen=True)
class StorageTuple:
    part_index: int
    part_bytes: bytes
    eval_witness: object


@dataclass(frozen=True)
class PoeProof:
    part_index: int
    value: int           # claimed part digest v_j
    eval_witness: object
    binding: int         # r = H2(challenge, part)
    relation_proof: bytes


@dataclass(frozen=True)
class PoeKeys:
    relation_pk: bytes
    relation_vk: bytes
    srs: Srs
    relation_system: object


class RelationProofSystem:
    """Argues knowledge of m with v == H1(m) and r == H2(c, m).

    Statements are (c, v, r) scalar triples.  Implementations must be
    stateless after setup.  Contract: honest proofs always verify
    (completeness); a verifying proof implies such an m exists and can be
    extracted (soundness).
    """

    name = "abstract"

    def setup(self, rng):
        raise NotImplementedError

    def prove(self, pk, statement, witness):
        raise NotImplementedError

    def verify(self, vk, statement, proof):
        raise NotImplementedError


class RevealRelationSystem(RelationProofSystem):
    """Reference backend: the proof is the witness itself.

    The verifier recomputes both hashes from the revealed bytes, so
    soundness holds by construction.  The proof size is linear in the part
    and the response leaks the part; a succinct backend can be swapped in
    through the same interface without touching the protocol.
    """

    name = "reveal"

    def __init__(self, suite):
        self.suite = suite

    def setup(self, rng):
        return b"", b""

    def prove(self, pk, statement, witness):
        return bytes(witness)

    def verify(self, vk, statement, proof):
        c, v, r = statement
        return self.suite.h1(proof) == v and self.suite.h2(c, proof) == r


class ConstantSizeRelationStub(RelationProofSystem):
    """Fixed-size stand-in used only by the response cost model.

    Verification defers to a trusted recomputation oracle injected by the
    harness; there is no cryptography here and it must never back a
    security decision.
    """

    name = "constant-stub"
    PROOF_SIZE = 192

    def __init__(self, oracle=None):
        self.oracle = oracle

    def setup(self, rng):
        return b"", b""

    def prove(self, pk, statement, witness):
        return b"\x00" * self.PROOF_SIZE

    def verify(self, vk, statement, proof):
        if self.oracle is None:
            raise RuntimeError("constant-size stub has no trusted oracle installed")
        return len(proof) == self.PROOF_SIZE and self.oracle(statement)


def poe_setup(srs, relation_system, rng):
    pk, vk = relation_system.setup(rng)
    return PoeKeys(relation_pk=pk, relation_vk=vk, srs=srs,
                   relation_system=relation_system)


def poe_challenge(batch_index, rng, order):
    """Fresh uniform challenge scalar for the given batch."""
    return ChallengeRequest(batch_index=batch_index, challenge=rng.randrange(order))


def poe_response(keys, req, stored, suite):
    """Build the five-field response from a stored tuple."""
    v = suite.h1(stored.part_bytes)
    r = suite.h2(req.challenge, stored.part_bytes)
    relation_proof = keys.relation_system.prove(
        keys.relation_pk, (req.challenge, v, r), stored.part_bytes)
    return PoeProof(part_index=stored.part_index, value=v,
                    eval_witness=stored.eval_witness, binding=r,
                    relation_proof=relation_proof)


def poe_verify(keys, req, proof, hidden_state):
    """Both checks must pass: evaluation proof and challenge-bound relation.

    hidden_state is the commitment covering the challenged batch's data,
    supplied by the caller (the contract layer knows which header carries
    it); this function stays pure.
    """
    if not kzg_verify_eval(keys.srs, hidden_state, proof.part_index,
                           proof.value, proof.eval_witness):
        return False
    return keys.relation_system.verify(
        keys.relation_vk, (req.challenge, proof.value, proof.binding),
        proof.relation_proof)


def _scalar_width(backend):
    return (backend.order.bit_length() + 7) // 8


def serialize_poe_proof(proof, backend):
    """(u32 j, scalar v, element, scalar r, u32-length relation proof)."""
    w = _scalar_width(backend)
    return b"".join([
        proof.part_index.to_bytes(4, "big"),
        proof.value.to_bytes(w, "big"),
        backend.element_to_bytes(proof.eval_witness),
        proof.binding.to_bytes(w, "big"),
        len(proof.relation_proof).to_bytes(4, "big"),
        proof.relation_proof,
    ])


def deserialize_poe_proof(data, backend):
    w = _scalar_width(backend)
    off = 0
    j = int.from_bytes(data[off:off + 4], "big")
    off += 4
    v = int.from_bytes(data[off:off + w], "big")
    off += w
    witness = backend.element_from_bytes(data[off:off + backend.element_size])
    off += backend.element_size
    r = int.from_bytes(data[off:off + w], "big")
    off += w
    n = int.from_bytes(data[off:off + 4], "big")
    off += 4
    if len(data) != off + n:
        raise ValueError("truncated response")
    return PoeProof(part_index=j, value=v, eval_witness=witness, binding=r,
                    relation_proof=data[off:off + n])
