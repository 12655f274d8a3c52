import random

import pytest

from rollup_da.kzg import kzg_eval
from rollup_da.pod import HashSuite, partition, pod_setup, pod_prove, digest_polynomial
from rollup_da.poe import (poe_setup, poe_challenge, poe_response, poe_verify,
                           PoeProof, StorageTuple, RevealRelationSystem,
                           ConstantSizeRelationStub, serialize_poe_proof,
                           deserialize_poe_proof)
from conftest import MappedHashSuite


def make_deployment(backend, seed=10, max_parts=4):
    suite = HashSuite(backend.order)
    keys = pod_setup(backend, max_parts, random.Random(seed))
    poe_keys = poe_setup(keys.pk, RevealRelationSystem(suite), random.Random(seed))
    return suite, keys, poe_keys


def stored_tuple(keys, suite, payload, k, j):
    parts = partition(payload, k)
    phi = digest_polynomial(keys.pk.backend.field, suite, payload, k)
    proof = kzg_eval(keys.pk, phi, j)
    return StorageTuple(part_index=j, part_bytes=parts[j], eval_witness=proof.witness)


def test_setup_reveal_backend_has_empty_tokens(toy101):
    suite, keys, poe_keys = make_deployment(toy101)
    assert poe_keys.relation_pk == b"" and poe_keys.relation_vk == b""
    assert poe_keys.srs is keys.pk


def test_setup_deterministic(toy101):
    _, _, a = make_deployment(toy101, seed=3)
    _, _, b = make_deployment(toy101, seed=3)
    assert a.srs == b.srs


def test_challenge_reproducible_and_echoes_index(toy101):
    a = poe_challenge(9, random.Random(4), toy101.order)
    b = poe_challenge(9, random.Random(4), toy101.order)
    assert a == b
    assert a.batch_index == 9
    assert 0 <= a.challenge < toy101.order


def test_challenge_uniformity_chi_square(curve):
    # chi-square on the low 6 bits over 10^4 draws; df=63, 1% critical 92.01
    rng = random.Random(1234)
    counts = [0] * 64
    for i in range(10_000):
        req = poe_challenge(i, rng, curve.order)
        counts[req.challenge & 63] += 1
    expected = 10_000 / 64
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    assert chi2 < 92.01


def test_response_and_verify_round_trip(toy101):
    suite, keys, poe_keys = make_deployment(toy101)
    rng = random.Random(5)
    for _ in range(30):
        payload = rng.randbytes(rng.randrange(12, 90))
        k = rng.randrange(2, 5)
        j = rng.randrange(k)
        hidden = pod_prove(keys, payload, k, suite)
        tup = stored_tuple(keys, suite, payload, k, j)
        req = poe_challenge(0, rng, toy101.order)
        proof = poe_response(poe_keys, req, tup, suite)
        assert proof.part_index == j
        assert poe_verify(poe_keys, req, proof, hidden)


def test_response_binding_differs_per_challenge(toy):
    suite, keys, poe_keys = make_deployment(toy)
    rng = random.Random(6)
    payload = rng.randbytes(40)
    tup = stored_tuple(keys, suite, payload, 4, 1)
    seen = set()
    for _ in range(50):
        req = poe_challenge(0, rng, toy.order)
        seen.add(poe_response(poe_keys, req, tup, suite).binding)
    # the 7919-element toy field keeps accidental collisions rare over 50 draws
    assert len(seen) > 45


def test_response_with_pinned_hashes(toy101):
    keys = pod_setup(toy101, 4, random.Random(2))
    payload = bytes(range(20))
    parts = partition(payload, 4)
    suite = MappedHashSuite(toy101.order, h1_map={parts[2]: 2},
                            h2_map={(77, parts[2]): 9})
    poe_keys = poe_setup(keys.pk, RevealRelationSystem(suite), random.Random(2))
    phi = digest_polynomial(toy101.field, suite, payload, 4)
    witness = kzg_eval(keys.pk, phi, 2).witness
    tup = StorageTuple(2, parts[2], witness)
    req = poe_challenge(0, random.Random(0), toy101.order)
    req = type(req)(batch_index=req.batch_index, challenge=77)
    proof = poe_response(poe_keys, req, tup, suite)
    assert (proof.part_index, proof.value, proof.binding) == (2, 2, 9)


def test_verify_rejects_wrong_part_bytes(toy101):
    suite, keys, poe_keys = make_deployment(toy101)
    rng = random.Random(7)
    payload = rng.randbytes(48)
    hidden = pod_prove(keys, payload, 4, suite)
    tup = stored_tuple(keys, suite, payload, 4, 0)
    wrong = StorageTuple(0, tup.part_bytes[:-1] + b"\x00", tup.eval_witness)
    req = poe_challenge(0, rng, toy101.order)
    assert not poe_verify(poe_keys, req, poe_response(poe_keys, req, wrong, suite), hidden)


def test_verify_rejects_stale_challenge_replay(toy101):
    suite, keys, poe_keys = make_deployment(toy101)
    rng = random.Random(8)
    payload = rng.randbytes(36)
    hidden = pod_prove(keys, payload, 3, suite)
    tup = stored_tuple(keys, suite, payload, 3, 2)
    old_req = poe_challenge(0, rng, toy101.order)
    old_proof = poe_response(poe_keys, old_req, tup, suite)
    assert poe_verify(poe_keys, old_req, old_proof, hidden)
    while True:
        new_req = poe_challenge(0, rng, toy101.order)
        if new_req.challenge != old_req.challenge:
            break
    assert not poe_verify(poe_keys, new_req, old_proof, hidden)


def test_deletion_adversary_tactics_fail(curve):
    """A responder holding (j, v_j, witness) but not the part loses.

    Tactics: replaying a stale transcript, guessing the binding value, and
    substituting foreign bytes for the relation proof.
    """
    suite, keys, poe_keys = make_deployment(curve)
    rng = random.Random(9)
    payload = rng.randbytes(64)
    other_payload = rng.randbytes(64)
    hidden = pod_prove(keys, payload, 4, suite)
    tup = stored_tuple(keys, suite, payload, 4, 1)
    old_req = poe_challenge(0, rng, curve.order)
    old_proof = poe_response(poe_keys, old_req, tup, suite)

    for _ in range(40):
        fresh = poe_challenge(0, rng, curve.order)
        if fresh.challenge == old_req.challenge:
            continue
        # (a) replay the stale transcript wholesale
        assert not poe_verify(poe_keys, fresh, old_proof, hidden)
        # (b) keep the recorded digest fields but guess the binding value
        guessed = PoeProof(part_index=1, value=old_proof.value,
                           eval_witness=old_proof.eval_witness,
                           binding=rng.randrange(curve.order),
                           relation_proof=other_payload)
        assert not poe_verify(poe_keys, fresh, guessed, hidden)
        # (c) substitute random bytes as the relation proof
        junk = PoeProof(part_index=1, value=old_proof.value,
                        eval_witness=old_proof.eval_witness,
                        binding=suite.h2(fresh.challenge, other_payload),
                        relation_proof=other_payload)
        assert not poe_verify(poe_keys, fresh, junk, hidden)


def test_binding_injective_over_many_challenges(curve):
    suite = HashSuite(curve.order)
    part = b"some stored part bytes"
    rng = random.Random(10)
    seen = set()
    for _ in range(100_000):
        seen.add(suite.h2(rng.randrange(curve.order), part))
    assert len(seen) == 100_000


def test_proof_serialization_round_trip(toy101, curve):
    for backend in (toy101, curve):
        suite, keys, poe_keys = make_deployment(backend)
        rng = random.Random(11)
        payload = rng.randbytes(32)
        tup = stored_tuple(keys, suite, payload, 4, 3)
        req = poe_challenge(2, rng, backend.order)
        proof = poe_response(poe_keys, req, tup, suite)
        blob = serialize_poe_proof(proof, backend)
        assert deserialize_poe_proof(blob, backend) == proof
        with pytest.raises(ValueError):
            deserialize_poe_proof(blob[:-1], backend)


def test_constant_stub_properties(toy101):
    stub = ConstantSizeRelationStub()
    assert len(stub.prove(b"", (1, 2, 3), b"whatever")) == 192
    with pytest.raises(RuntimeError):
        stub.verify(b"", (1, 2, 3), b"\x00" * 192)
    blessed = ConstantSizeRelationStub(oracle=lambda statement: statement == (1, 2, 3))
    assert blessed.verify(b"", (1, 2, 3), b"\x00" * 192)
    assert not blessed.verify(b"", (9, 9, 9), b"\x00" * 192)
