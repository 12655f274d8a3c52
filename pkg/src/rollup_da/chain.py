"""Simulated base chain: blocks with proposal blobs, batch records, the
validity contract, and the arbiter contract with deposits, deadlines, and
slashing.

The contracts are plain state machines owned by the simulator's event
loop; operations are sequential transitions and raise on contract
violations rather than corrupting state.  Funds are conserved: every unit
deposited is either still a deposit or a challenger credit.
"""

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from . import poe as poe_mod

RESPONSE_ACCEPTED = "accepted"
RESPONSE_SLASHED = "slashed"
TIMEOUT_SLASHED = "timeout-slashed"


class IndexOutOfRangeError(ValueError):
    pass


class ZeroAmountError(ValueError):
    pass


class BuilderNotEligibleError(ValueError):
    pass


class UnknownChallengeError(KeyError):
    pass


class PastDeadlineError(ValueError):
    pass


# ---------------------------------------------------------------------------
# proposals and blob commitments (Merkle over canonical encodings)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Proposal:
    proposer_id: int
    epoch: int              # batch height this proposal is for
    tx_hashes: tuple        # H3 digests of the selected transactions

    def encode(self):
        out = [self.proposer_id.to_bytes(4, "big"), self.epoch.to_bytes(8, "big"),
               len(self.tx_hashes).to_bytes(4, "big")]
        out += [h.to_bytes(32, "big") for h in self.tx_hashes]
        return b"".join(out)


def _leaf(data):
    return hashlib.sha256(b"\x00" + data).digest()


def _node(left, right):
    return hashlib.sha256(b"\x01" + left + right).digest()


def blob_commit(proposals):
    """Merkle root over the canonical proposal encodings."""
    if not proposals:
        return _leaf(b"")
    level = [_leaf(p.encode()) for p in proposals]
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [_node(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


@dataclass(frozen=True)
class MembershipProof:
    index: int
    path: tuple  # (sibling digest, sibling_is_left) pairs, leaf upward


def blob_prove(proposals, index):
    if not 0 <= index < len(proposals):
        raise IndexOutOfRangeError("no proposal at index %d" % index)
    level = [_leaf(p.encode()) for p in proposals]
    path = []
    pos = index
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        sibling = pos ^ 1
        path.append((level[sibling], sibling < pos))
        level = [_node(level[i], level[i + 1]) for i in range(0, len(level), 2)]
        pos //= 2
    return MembershipProof(index=index, path=tuple(path))


def blob_verify(root, proposal, proof):
    node = _leaf(proposal.encode())
    for sibling, sibling_is_left in proof.path:
        node = _node(sibling, node) if sibling_is_left else _node(node, sibling)
    return node == root


# ---------------------------------------------------------------------------
# batches and blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BatchHeader:
    batch_index: int
    hidden_state: object     # commitment carried as the proof of download
    nonce: int
    proposer_id: int
    luck: float
    payload_digest: bytes
    prev_batch_digest: bytes

    def encode_without_nonce(self):
        hs = self.hidden_state.point
        hs_bytes = repr(hs).encode()
        return b"".join([
            b"hdr", self.batch_index.to_bytes(8, "big"),
            hs_bytes, self.proposer_id.to_bytes(4, "big"),
            repr(self.luck).encode(), self.payload_digest, self.prev_batch_digest,
        ])

    def digest(self):
        return hashlib.sha256(
            self.encode_without_nonce() + self.nonce.to_bytes(32, "big")).digest()


@dataclass(frozen=True)
class Batch:
    header: BatchHeader
    payload: bytes

    def digest(self):
        return self.header.digest()


@dataclass(frozen=True)
class SyncedBatch:
    batch_digest: bytes
    hidden_state: object
    validity_token: object   # stand-in for the batch-validity proof
    proposal: Proposal
    membership: MembershipProof


@dataclass(frozen=True)
class Block:
    height: int
    parent_digest: bytes
    blob: tuple              # proposals for the next batch
    blob_root: bytes
    synced_batch: Optional[SyncedBatch]

    def header_bytes(self):
        synced = self.synced_batch.batch_digest if self.synced_batch else b""
        return b"".join([b"blk", self.height.to_bytes(8, "big"),
                         self.parent_digest, self.blob_root, synced])

    def digest(self):
        return hashlib.sha256(self.header_bytes()).digest()


def make_block(height, parent_digest, proposals, synced_batch):
    return Block(height=height, parent_digest=parent_digest,
                 blob=tuple(proposals), blob_root=blob_commit(proposals),
                 synced_batch=synced_batch)


# ---------------------------------------------------------------------------
# validity contract
# ---------------------------------------------------------------------------

class ValidityContract:
    """Records accepted batches and their hidden states.

    The batch-validity argument itself is out of desk scope; a submission
    carries an opaque token that the deployment's oracle vouches for, which
    preserves the control flow without fake cryptography.
    """

    def __init__(self, quorum, token_oracle, registered_proposers):
        self.quorum = quorum
        self.token_oracle = token_oracle
        self.registered_proposers = set(registered_proposers)
        self.hidden_states = {}   # batch index -> hidden state
        self.batch_digests = {}   # batch index -> digest

    def record_batch(self, prior_block, batch, synced, notes, sync_height=None):
        """All checks must pass before the hidden state is recorded.

        sync_height is the base-chain height the batch lands at; proposals
        declare the height they were submitted for and anything stale or
        early is rejected.  Defaults to the batch index for deployments
        where the two never diverge.
        """
        if sync_height is None:
            sync_height = batch.header.batch_index
        if synced.proposal.proposer_id not in self.registered_proposers:
            return False
        if synced.proposal.epoch != sync_height:
            return False
        if not blob_verify(prior_block.blob_root, synced.proposal, synced.membership):
            return False
        if not self.token_oracle(synced.validity_token):
            return False
        if len(set(notes)) < self.quorum:
            return False
        idx = batch.header.batch_index
        self.hidden_states[idx] = synced.hidden_state
        self.batch_digests[idx] = synced.batch_digest
        return True

    def hidden_state_for(self, batch_index):
        return self.hidden_states.get(batch_index)


# ---------------------------------------------------------------------------
# arbiter contract
# ---------------------------------------------------------------------------

@dataclass
class OpenChallenge:
    request: poe_mod.ChallengeRequest
    challenger_id: str
    builder_id: int
    deadline_height: int


class ArbiterContract:
    """Deposits, open challenges with deadlines, slashing.

    challenger_bond, when nonzero, is escrowed from the challenger at open
    time as a spam deterrent: it comes back on a successful challenge and
    is forfeited to the responding builder otherwise.
    """

    def __init__(self, response_window, redeposit_allowed=True,
                 challenger_bond=0):
        if response_window < 1:
            raise ValueError("response window must be >= 1 block")
        if challenger_bond < 0:
            raise ValueError("bond cannot be negative")
        self.response_window = response_window
        self.redeposit_allowed = redeposit_allowed
        self.challenger_bond = challenger_bond
        self.deposits = {}
        self.credits = {}          # challenger id -> funds received/refunded
        self.escrow = 0            # bonds held for open challenges
        self.open_challenges = {}
        self.resolved = []         # (challenge id, outcome) log
        self.slashed_ever = set()
        self._next_id = 0

    def total_balance(self):
        return (sum(self.deposits.values()) + sum(self.credits.values())
                + self.escrow)

    def is_eligible(self, builder_id):
        return self.deposits.get(builder_id, 0) > 0

    def deposit(self, builder_id, amount):
        if amount <= 0:
            raise ZeroAmountError("deposit must be positive")
        if builder_id in self.slashed_ever and not self.redeposit_allowed:
            raise BuilderNotEligibleError("builder %r was slashed and may not rejoin"
                                          % (builder_id,))
        self.deposits[builder_id] = self.deposits.get(builder_id, 0) + amount

    def open_challenge(self, request, challenger_id, builder_id, now_height,
                       window=None):
        if not self.is_eligible(builder_id):
            raise BuilderNotEligibleError("builder %r has no deposit" % (builder_id,))
        window = self.response_window if window is None else window
        if window < 1:
            raise ValueError("response window must be >= 1 block")
        cid = self._next_id
        self._next_id += 1
        self.escrow += self.challenger_bond
        self.open_challenges[cid] = OpenChallenge(
            request=request, challenger_id=challenger_id, builder_id=builder_id,
            deadline_height=now_height + window)
        return cid

    def _release_bond(self, to_credits, who):
        if self.challenger_bond:
            self.escrow -= self.challenger_bond
            pool = self.credits if to_credits else self.deposits
            pool[who] = pool.get(who, 0) + self.challenger_bond

    def _slash(self, cid, challenge, outcome):
        amount = self.deposits.pop(challenge.builder_id, 0)
        self.credits[challenge.challenger_id] = (
            self.credits.get(challenge.challenger_id, 0) + amount)
        self._release_bond(True, challenge.challenger_id)
        self.slashed_ever.add(challenge.builder_id)
        del self.open_challenges[cid]
        self.resolved.append((cid, outcome))

    def respond(self, cid, proof, poe_keys, hidden_state_source, now_height):
        """Verify a response against the recorded hidden state.

        hidden_state_source maps a data batch index to the commitment that
        covers it (the one carried two batches later).
        """
        challenge = self.open_challenges.get(cid)
        if challenge is None:
            raise UnknownChallengeError(cid)
        if now_height > challenge.deadline_height:
            raise PastDeadlineError(
                "challenge %d expired at height %d" % (cid, challenge.deadline_height))
        hidden_state = hidden_state_source(challenge.request.batch_index)
        ok = (hidden_state is not None
              and poe_mod.poe_verify(poe_keys, challenge.request, proof, hidden_state))
        if ok:
            self._release_bond(False, challenge.builder_id)
            del self.open_challenges[cid]
            self.resolved.append((cid, RESPONSE_ACCEPTED))
            return RESPONSE_ACCEPTED
        self._slash(cid, challenge, RESPONSE_SLASHED)
        return RESPONSE_SLASHED

    def timeout_sweep(self, now_height):
        """Slash every challenge whose deadline has passed unanswered."""
        expired = [cid for cid, ch in self.open_challenges.items()
                   if ch.deadline_height < now_height]
        for cid in sorted(expired):
            self._slash(cid, self.open_challenges[cid], TIMEOUT_SLASHED)
        return len(expired)


def dump_chain_jsonl(blocks, balance_history=None):
    """One JSON record per block, with stable field names.

    balance_history, when given, is one contract-balances snapshot per
    block ({"deposits": {...}, "credits": {...}}), taken as that block was
    produced.
    """
    lines = []
    for n, blk in enumerate(blocks):
        rec = {
            "height": blk.height,
            "blob_root": blk.blob_root.hex(),
            "synced_batch_digest": (blk.synced_batch.batch_digest.hex()
                                    if blk.synced_batch else None),
        }
        if balance_history is not None and n < len(balance_history):
            rec["balances"] = balance_history[n]
        lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines) + "\n"
