"""Deterministic discrete-time simulator for the rollup protocol.

One tick produces one base-chain block.  Within a tick, proposers publish
proposals into the block's blob, builders race to extend the batch chain
(download-bound hidden state, luck-weighted nonce search), peers verify
and note the winning batch, the validity contract records its hidden
state, and every builder that holds the data stores one random part with
its evaluation witness.  Challenge rounds exercise the arbiter contract.

All randomness flows from a single master seed through per-purpose child
generators, so identical configs give bit-identical metrics and dumps.
"""

import hashlib
import json
import random
from dataclasses import dataclass, field, asdict
from typing import Optional

from .algebra import ToyBackend
from .pairing import CurveBackend
from .kzg import Commitment, kzg_eval
from . import pod
from . import poe
from . import chain
from . import luck as luck_mod

HONEST = "honest"
LAZY = "lazy-no-download"
DELETE = "delete-fraction"
WITHHOLD = "withholder"
COLLUDE = "colluder"

_DOWNLOADERS = {HONEST, DELETE, WITHHOLD, COLLUDE}


@dataclass(frozen=True)
class Strategy:
    kind: str = HONEST
    delete_fraction: float = 0.0
    partners: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.delete_fraction <= 1.0:
            raise ValueError("delete fraction must be in [0, 1]")


def honest():
    return Strategy(HONEST)


def lazy():
    return Strategy(LAZY)


def delete_fraction(p):
    return Strategy(DELETE, delete_fraction=p)


def withholder():
    return Strategy(WITHHOLD)


def colluder(*partners):
    return Strategy(COLLUDE, partners=tuple(partners))


@dataclass
class SimConfig:
    n_builders: int = 4
    n_proposers: int = 8
    k: int = 3
    max_degree: int = 8
    quorum: Optional[int] = None          # default: majority of builders
    response_window: int = 2
    difficulty_a: float = 10.5
    difficulty_b: float = 0.05
    max_nonce_attempts: int = 120
    hidden_state_lag: int = 2
    overlapped: bool = True
    period_length: int = 2                # split mode: blocks per batch
    split_d: int = 1                      # split mode: proposing sub-period
    seed: int = 0
    rounds: int = 50
    tx_size: int = 48
    txs_per_proposal: int = 4
    backend: str = "toy"
    toy_order: int = 7919
    deposit_amount: int = 100
    redeposit_allowed: bool = True
    query_fee: int = 0                    # reserved; no fee market is modeled
    challenge_target: Optional[int] = None

    def __post_init__(self):
        if not 2 <= self.k <= self.max_degree + 1:
            raise ValueError("need 2 <= k <= max_degree + 1")
        if self.hidden_state_lag < 2:
            raise ValueError("hidden-state lag must be >= 2")
        if self.quorum is None:
            self.quorum = self.n_builders // 2 + 1
        if self.quorum > self.n_builders:
            raise ValueError("quorum cannot exceed the builder count")
        if not self.overlapped and self.split_d >= self.period_length:
            raise ValueError("split point must leave at least one building block")

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


@dataclass
class BuilderState:
    builder_id: int
    strategy: Strategy
    alive: bool = True
    payloads: dict = field(default_factory=dict)   # batch index -> payload bytes
    stored: dict = field(default_factory=dict)     # batch index -> StorageTuple
    attempts: int = 0
    nonce_successes: int = 0
    wins: int = 0


@dataclass
class Metrics:
    rounds: int = 0
    batches_accepted: int = 0
    producer_counts: dict = field(default_factory=dict)
    challenges_opened: int = 0
    challenges_accepted: int = 0
    slashes: dict = field(default_factory=dict)
    detections: int = 0

    def to_json(self):
        out = {
            "rounds": self.rounds,
            "batches_accepted": self.batches_accepted,
            "producer_counts": {str(k): v for k, v in sorted(self.producer_counts.items())},
            "challenges_opened": self.challenges_opened,
            "challenges_accepted": self.challenges_accepted,
            "slashes": {str(k): v for k, v in sorted(self.slashes.items())},
            "detections": self.detections,
        }
        return json.dumps(out, sort_keys=True)


class World:
    """Owns all protocol state; single-threaded by design."""

    def __init__(self, config, strategies=None):
        self.config = config
        self.backend = ToyBackend(config.toy_order) if config.backend == "toy" else CurveBackend()
        self.suite = pod.HashSuite(self.backend.order)
        self.field = self.backend.field
        self.params = luck_mod.DifficultyParams(config.difficulty_a, config.difficulty_b)
        self.pod_keys = pod.pod_setup(self.backend, config.max_degree,
                                      self.rng_for("pod-setup"))
        self.poe_keys = poe.poe_setup(self.pod_keys.pk,
                                      poe.RevealRelationSystem(self.suite),
                                      self.rng_for("poe-setup"))
        strategies = strategies or {}
        self.builders = [BuilderState(i, strategies.get(i, honest()))
                         for i in range(config.n_builders)]
        self.issued_tokens = set()
        self.validity = chain.ValidityContract(
            quorum=config.quorum,
            token_oracle=lambda tok: tok in self.issued_tokens,
            registered_proposers=range(config.n_proposers))
        self.arbiter = chain.ArbiterContract(config.response_window,
                                             config.redeposit_allowed)
        for b in self.builders:
            self.arbiter.deposit(b.builder_id, config.deposit_amount)
        self.blocks = []
        self.batches = {}
        self.txpool = {}
        self.metrics = Metrics()
        self.balance_history = []
        self.nonce_log = []      # (round, builder, distance, target, found)
        self.challenge_log = []  # (challenge id, batch, builder, outcome)
        self.part_assignment = None   # test hook: (builder_id, batch, k) -> part
        self.propose_every_tick = False  # test hook: late proposals in split mode
        self._next_token = 0
        self._bootstrap()

    # -- randomness ---------------------------------------------------------

    def rng_for(self, purpose, *indices):
        material = hashlib.sha256(
            b"rollup-sim:" + self.config.seed.to_bytes(8, "big", signed=True)
            + purpose.encode() + b":" + ",".join(map(str, indices)).encode()
        ).digest()
        return random.Random(int.from_bytes(material, "big"))

    # -- bootstrap ----------------------------------------------------------

    def _genesis_hidden_state(self):
        # commitment to the empty digest polynomial: the group identity
        return Commitment(self.backend.identity())

    def _bootstrap(self):
        cfg = self.config
        parent = b"\x00" * 32
        for height in (0, 1):
            payload = self.rng_for("genesis-payload", height).randbytes(
                max(cfg.tx_size * cfg.txs_per_proposal, cfg.k))
            header = chain.BatchHeader(
                batch_index=height, hidden_state=self._genesis_hidden_state(),
                nonce=0, proposer_id=0, luck=0.0,
                payload_digest=hashlib.sha256(payload).digest(),
                prev_batch_digest=parent)
            batch = chain.Batch(header=header, payload=payload)
            self.batches[height] = batch
            self.validity.hidden_states[height] = header.hidden_state
            self.validity.batch_digests[height] = batch.digest()
            proposals = self._make_proposals(height + 1)
            block = chain.make_block(height, parent, proposals, None)
            self.blocks.append(block)
            self.balance_history.append(self._balances())
            parent = block.digest()
        for b in self.builders:
            if b.strategy.kind in _DOWNLOADERS:
                b.payloads[0] = self.batches[0].payload
                b.payloads[1] = self.batches[1].payload
        self.next_batch = 2

    def _balances(self):
        return {
            "deposits": {str(k): v for k, v in sorted(self.arbiter.deposits.items())},
            "credits": {str(k): v for k, v in sorted(self.arbiter.credits.items())},
        }

    # -- proposals ----------------------------------------------------------

    def _make_proposals(self, epoch):
        cfg = self.config
        proposals = []
        for pid in range(cfg.n_proposers):
            rng = self.rng_for("txs", epoch, pid)
            hashes = []
            for _ in range(cfg.txs_per_proposal):
                tx = rng.randbytes(cfg.tx_size)
                h = self.suite.h3(tx)
                self.txpool[h] = tx
                hashes.append(h)
            proposals.append(chain.Proposal(proposer_id=pid, epoch=epoch,
                                            tx_hashes=tuple(hashes)))
        return proposals

    def _payload_for(self, proposal):
        return b"".join(self.txpool[h] for h in proposal.tx_hashes)

    def _select_proposal(self, builder, candidates, luck_value):
        cfg = self.config
        if builder.strategy.kind == COLLUDE and builder.strategy.partners:
            for p in candidates:
                if p.proposer_id in builder.strategy.partners:
                    return p
        # honest rule: minimize ring distance, lowest proposer id on ties
        return min(candidates,
                   key=lambda p: (luck_mod.distance(float(p.proposer_id), luck_value,
                                                    cfg.n_proposers), p.proposer_id))

    # -- one tick -----------------------------------------------------------

    def run_round(self):
        if self.config.overlapped:
            self._run_tick_overlapped()
        else:
            self._run_tick_split()

    def _issue_token(self):
        token = ("batch-ok", self._next_token)
        self._next_token += 1
        self.issued_tokens.add(token)
        return token

    def _build_candidates(self, batch_index, candidates, luck_value, height):
        """Every eligible builder races the nonce search; returns successes."""
        cfg = self.config
        results = []
        data_idx = batch_index - cfg.hidden_state_lag
        for b in self.builders:
            if not b.alive or not self.arbiter.is_eligible(b.builder_id):
                continue
            if not candidates:
                continue
            proposal = self._select_proposal(b, candidates, luck_value)
            honest_build = (b.strategy.kind in _DOWNLOADERS
                            and data_idx in b.payloads)
            if honest_build:
                hidden = pod.pod_prove(self.pod_keys, b.payloads[data_idx],
                                       cfg.k, self.suite)
                token = self._issue_token()
            else:
                # forged proof of download: a random commitment
                forged = self.backend.mul(self.backend.generator(),
                                          self.rng_for("forge", height,
                                                       b.builder_id).randrange(1, self.backend.order))
                hidden = Commitment(forged)
                token = ("forged", height, b.builder_id)
            payload = self._payload_for(proposal)
            header = chain.BatchHeader(
                batch_index=batch_index, hidden_state=hidden, nonce=0,
                proposer_id=proposal.proposer_id, luck=luck_value,
                payload_digest=hashlib.sha256(payload).digest(),
                prev_batch_digest=self.batches[batch_index - 1].digest())
            d = luck_mod.distance(float(proposal.proposer_id), luck_value,
                                  cfg.n_proposers)
            target = luck_mod.difficulty(self.params, d)
            nonce, attempts = luck_mod.search_nonce(
                header.encode_without_nonce(), target, cfg.max_nonce_attempts,
                self.rng_for("nonce", height, b.builder_id))
            b.attempts += attempts
            found = nonce is not None
            if found:
                b.nonce_successes += 1
            self.nonce_log.append((height, b.builder_id, d, target, found))
            if found:
                results.append((attempts, b.builder_id, proposal, payload,
                                hidden, nonce, token, honest_build))
        results.sort(key=lambda r: (r[0], r[1]))
        return results

    def _try_accept(self, batch_index, results, luck_value, proposal_blocks,
                    height):
        """Walk the winners in success order until one batch is accepted."""
        cfg = self.config
        data_idx = batch_index - cfg.hidden_state_lag
        for attempts, bid, proposal, payload, hidden, nonce, token, honest_build in results:
            src_block = None
            for blk in proposal_blocks:
                if proposal in blk.blob:
                    src_block = blk
                    break
            if src_block is None:
                continue
            header = chain.BatchHeader(
                batch_index=batch_index, hidden_state=hidden, nonce=nonce,
                proposer_id=proposal.proposer_id, luck=luck_value,
                payload_digest=hashlib.sha256(payload).digest(),
                prev_batch_digest=self.batches[batch_index - 1].digest())
            batch = chain.Batch(header=header, payload=payload)
            membership = chain.blob_prove(src_block.blob, src_block.blob.index(proposal))
            synced = chain.SyncedBatch(
                batch_digest=batch.digest(), hidden_state=hidden,
                validity_token=token, proposal=proposal, membership=membership)
            notes = []
            d = luck_mod.distance(float(proposal.proposer_id), luck_value,
                                  cfg.n_proposers)
            target = luck_mod.difficulty(self.params, d)
            for peer in self.builders:
                if peer.strategy.kind not in _DOWNLOADERS or data_idx not in peer.payloads:
                    continue
                if not luck_mod.check_nonce(header.encode_without_nonce(),
                                            nonce, target):
                    continue
                if not chain.blob_verify(src_block.blob_root, proposal, membership):
                    continue
                if pod.pod_verify(self.pod_keys, hidden, peer.payloads[data_idx],
                                  cfg.k, self.suite):
                    notes.append(peer.builder_id)
            if self.validity.record_batch(src_block, batch, synced, notes,
                                          sync_height=height):
                self.batches[batch_index] = batch
                self.metrics.batches_accepted += 1
                self.metrics.producer_counts[bid] = (
                    self.metrics.producer_counts.get(bid, 0) + 1)
                self.builders[bid].wins += 1
                self._store_parts(batch_index, data_idx)
                return synced
        return None

    def _store_parts(self, batch_index, data_idx):
        """Each holder keeps one random part plus its evaluation witness."""
        cfg = self.config
        for b in self.builders:
            if data_idx not in b.payloads:
                continue
            if b.strategy.kind == DELETE:
                if (self.rng_for("delete", batch_index, b.builder_id).random()
                        < b.strategy.delete_fraction):
                    continue
            payload = b.payloads[data_idx]
            if self.part_assignment is not None:
                j = self.part_assignment(b.builder_id, data_idx, cfg.k)
            else:
                j = self.rng_for("part", batch_index, b.builder_id).randrange(cfg.k)
            phi = pod.digest_polynomial(self.field, self.suite, payload, cfg.k)
            proof = kzg_eval(self.pod_keys.pk, phi, j)
            parts = pod.partition(payload, cfg.k)
            b.stored[data_idx] = poe.StorageTuple(
                part_index=j, part_bytes=parts[j], eval_witness=proof.witness)

    def _finish_tick(self, proposals, synced, height):
        prev_digest = self.blocks[-1].digest()
        block = chain.make_block(height, prev_digest, proposals, synced)
        self.blocks.append(block)
        self.arbiter.timeout_sweep(height)
        self.balance_history.append(self._balances())
        self.metrics.rounds += 1
        if synced is not None:
            accepted_idx = self.next_batch
            self.next_batch += 1
            for b in self.builders:
                if b.strategy.kind in _DOWNLOADERS:
                    b.payloads[accepted_idx] = self.batches[accepted_idx].payload
                    stale = [ix for ix in b.payloads
                             if ix < accepted_idx - self.config.hidden_state_lag]
                    for ix in stale:
                        del b.payloads[ix]

    def _run_tick_overlapped(self):
        height = len(self.blocks)
        prev = self.blocks[-1]
        batch_index = self.next_batch
        luck_value = luck_mod.lucky_number(prev.header_bytes(),
                                           self.config.n_proposers, self.suite)
        candidates = [p for p in prev.blob if p.epoch == height]
        results = self._build_candidates(batch_index, candidates, luck_value, height)
        synced = self._try_accept(batch_index, results, luck_value, [prev], height)
        proposals = self._make_proposals(height + 1)
        self._finish_tick(proposals, synced, height)

    def _run_tick_split(self):
        """Non-overlapped periods: d proposing ticks, then building ticks.

        The lucky number settles on the last proposing block, so proposals
        arriving after it cannot chase the luck; they are simply outside
        the valid window.
        """
        cfg = self.config
        height = len(self.blocks)
        period_pos = (height - 2) % cfg.period_length
        sync_height = height - period_pos + cfg.period_length - 1
        if period_pos < cfg.split_d:
            proposals = self._make_proposals(sync_height)
            self._finish_tick(proposals, None, height)
            return
        # late proposals (submitted during the building sub-period) land in
        # blocks outside the window below, so builders never consider them
        late = self._make_proposals(sync_height) if self.propose_every_tick else ()
        synced = None
        if height == sync_height:
            luck_block = self.blocks[height - period_pos + cfg.split_d - 1]
            luck_value = luck_mod.lucky_number(luck_block.header_bytes(),
                                               cfg.n_proposers, self.suite)
            window = [self.blocks[h] for h in
                      range(height - period_pos, height - period_pos + cfg.split_d)]
            candidates = [p for blk in window for p in blk.blob
                          if p.epoch == sync_height]
            batch_index = self.next_batch
            results = self._build_candidates(batch_index, candidates,
                                             luck_value, height)
            synced = self._try_accept(batch_index, results, luck_value,
                                      window, height)
        self._finish_tick(late, synced, height)

    def run(self, rounds=None):
        for _ in range(self.config.rounds if rounds is None else rounds):
            self.run_round()

    # -- data availability challenges ----------------------------------------

    def challengeable_batches(self):
        lag = self.config.hidden_state_lag
        return [i for i in self.batches
                if self.validity.hidden_state_for(i + lag) is not None]

    def run_challenge_round(self, s, challenger_id="watcher", rng=None,
                            resolve=True):
        """Open s uniform challenges, collect responses, sweep timeouts."""
        cfg = self.config
        rng = rng or self.rng_for("challenge", len(self.blocks), s)
        now = len(self.blocks) - 1
        pool = self.challengeable_batches()
        if not pool:
            raise ValueError("no challengeable batch older than the lag")
        lookup = lambda b_idx: self.validity.hidden_state_for(b_idx + cfg.hidden_state_lag)
        opened = []
        for _ in range(s):
            b_idx = pool[rng.randrange(len(pool))]
            if cfg.challenge_target is not None:
                target = cfg.challenge_target
            else:
                eligible = [b.builder_id for b in self.builders
                            if self.arbiter.is_eligible(b.builder_id)]
                if not eligible:
                    break
                target = eligible[rng.randrange(len(eligible))]
            req = poe.poe_challenge(b_idx, rng, self.backend.order)
            cid = self.arbiter.open_challenge(req, challenger_id, target, now)
            self.metrics.challenges_opened += 1
            opened.append((cid, b_idx, target))
        for cid, b_idx, target in opened:
            if cid not in self.arbiter.open_challenges:
                continue
            builder = self.builders[target]
            stored = builder.stored.get(b_idx)
            responds = (builder.strategy.kind not in (WITHHOLD, LAZY)
                        and builder.alive and stored is not None)
            if not responds:
                continue
            req = self.arbiter.open_challenges[cid].request
            proof = poe.poe_response(self.poe_keys, req, stored, self.suite)
            outcome = self.arbiter.respond(cid, proof, self.poe_keys, lookup, now)
            self.challenge_log.append((cid, b_idx, target, outcome))
            if outcome == chain.RESPONSE_ACCEPTED:
                self.metrics.challenges_accepted += 1
            else:
                self._record_slash(target)
        if resolve:
            swept_ids = list(self.arbiter.open_challenges)
            n = self.arbiter.timeout_sweep(now + cfg.response_window + 1)
            if n:
                for cid, b_idx, target in opened:
                    if cid in swept_ids and cid not in self.arbiter.open_challenges:
                        outcome = dict(self.arbiter.resolved).get(cid)
                        if outcome == chain.TIMEOUT_SLASHED:
                            self.challenge_log.append((cid, b_idx, target, outcome))
                            self._record_slash(target)

    def _record_slash(self, builder_id):
        self.metrics.slashes[builder_id] = self.metrics.slashes.get(builder_id, 0) + 1
        self.metrics.detections += 1

    # -- recovery -------------------------------------------------------------

    def recover_payload(self, batch_index):
        """Reassemble a batch payload from the parts spread over builders."""
        cfg = self.config
        hidden = self.validity.hidden_state_for(batch_index + cfg.hidden_state_lag)
        if hidden is None:
            return None
        parts = {}
        for b in self.builders:
            if not b.alive:
                continue
            t = b.stored.get(batch_index)
            if t is not None:
                parts.setdefault(t.part_index, t.part_bytes)
        if set(parts) != set(range(cfg.k)):
            return None
        payload = b"".join(parts[j] for j in range(cfg.k))
        if not pod.pod_verify(self.pod_keys, hidden, payload, cfg.k, self.suite):
            return None
        return payload

    # -- dumps ----------------------------------------------------------------

    def chain_dump(self):
        return chain.dump_chain_jsonl(self.blocks, self.balance_history)

    def batches_dump(self):
        lines = []
        for idx in sorted(self.batches):
            b = self.batches[idx]
            lines.append(json.dumps({
                "batch_index": idx,
                "payload": b.payload.hex(),
                "proposer": b.header.proposer_id,
            }, sort_keys=True))
        return "\n".join(lines) + "\n"


def make_world(config, strategies=None):
    return World(config, strategies)
