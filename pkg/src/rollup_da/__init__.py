"""Rollup data-availability protocol library and deterministic simulator.

Layers, bottom up: field and polynomial arithmetic with a pluggable
pairing backend (algebra, pairing), polynomial commitments (kzg), proof of
download (pod), challenge-response proof of existence (poe), luck-weighted
leader selection (luck), the simulated base chain and contracts (chain),
the discrete-time world (sim), and the experiment harness (experiments).
"""

from .algebra import PrimeField, PairingBackend, ToyBackend
from .pairing import CurveBackend
from .kzg import (Srs, Commitment, EvalProof, kzg_setup, kzg_commit, kzg_open,
                  kzg_eval, kzg_verify_eval, serialize_srs, deserialize_srs)
from .pod import (HashSuite, HiddenState, PodKeys, partition, pod_setup,
                  pod_prove, pod_verify, pod_prove_multi, pod_verify_multi)
from .poe import (ChallengeRequest, StorageTuple, PoeProof, PoeKeys,
                  RelationProofSystem, RevealRelationSystem,
                  ConstantSizeRelationStub, poe_setup, poe_challenge,
                  poe_response, poe_verify, serialize_poe_proof,
                  deserialize_poe_proof)
from .luck import (DifficultyParams, lucky_number, distance, difficulty,
                   check_nonce, search_nonce, difficulty_ratio,
                   difficulty_log_ratio, in_inf_regime)
from .chain import (Proposal, Block, Batch, BatchHeader, MembershipProof,
                    blob_commit, blob_prove, blob_verify, ValidityContract,
                    ArbiterContract, dump_chain_jsonl)
from .sim import SimConfig, Strategy, World, make_world
from .experiments import (exp_detect, exp_recover, exp_pol, exp_cost,
                          detect_oracle, recover_oracle, ResultTable)

__version__ = "0.1.0"
