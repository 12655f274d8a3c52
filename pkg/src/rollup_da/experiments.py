"""Experiment harness: Monte Carlo estimates next to closed-form oracles.

Each experiment returns a ResultTable whose rows pair the simulated
estimate with the analytic value and, where one exists, a tabulated
reference figure for the same cell.  Gates in the test suite compare the
Monte Carlo column to the oracle column; the reference column is reported
for context only, since the exact sampling model behind those figures is
not reproducible.
"""

import hashlib
import io
import json
import math
import random
from dataclasses import dataclass

from . import luck as luck_mod
from . import pod
from . import poe

# reference detection rates for the comparison column, by (challenges, deleted fraction)
DETECT_REFERENCE = {
    (6, 0.05): 0.232, (6, 0.10): 0.413, (6, 0.15): 0.571,
    (6, 0.20): 0.686, (6, 0.25): 0.776, (6, 0.30): 0.837,
    (10, 0.05): 0.377, (10, 0.10): 0.676, (10, 0.15): 0.816,
    (10, 0.20): 0.882, (10, 0.25): 0.948, (10, 0.30): 0.975,
    (30, 0.05): 0.772, (30, 0.10): 0.961, (30, 0.15): 0.989,
    (30, 0.20): 0.999, (30, 0.25): 1.000, (30, 0.30): 1.000,
    (50, 0.05): 0.944, (50, 0.10): 0.995, (50, 0.15): 1.000,
    (50, 0.20): 1.000, (50, 0.25): 1.000, (50, 0.30): 1.000,
}

# reference difficulty-ratio table, by (window parameter a, colluded fraction);
# "inf" marks cells where the far target floors to zero, "~1" saturated cells
POL_REFERENCE = {
    (1.5, 0.01): "inf", (1.5, 0.02): "inf", (1.5, 0.03): 4.1e65,
    (1.5, 0.05): 6.9e36, (1.5, 0.10): 1.5e15, (1.5, 0.20): 1.8e4, (1.5, 0.30): 5.1,
    (2.5, 0.01): "inf", (2.5, 0.02): "inf", (2.5, 0.03): 2.0e61,
    (2.5, 0.05): 2.7e32, (2.5, 0.10): 2.7e6, (2.5, 0.20): 1.8, (2.5, 0.30): 1.0002,
    (5.5, 0.01): "inf", (5.5, 0.02): "inf", (5.5, 0.03): 2.9e48,
    (5.5, 0.05): 3.4e19, (5.5, 0.10): 1.0062, (5.5, 0.20): "~1", (5.5, 0.30): "~1",
    (10.5, 0.01): "inf", (10.5, 0.02): 2.9e62, (10.5, 0.03): 3.8e26,
    (10.5, 0.05): 1.0069, (10.5, 0.10): "~1", (10.5, 0.20): "~1", (10.5, 0.30): "~1",
}

# reference recovery-rate claims (lower bounds), by (builders, parts, failure rate)
RECOVER_REFERENCE = {(50, 5, 0.0): 0.9999, (100, 5, 0.5): 0.999}

DEFAULT_DETECT_S = (6, 10, 30, 50)
DEFAULT_DETECT_P = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
DEFAULT_POL_A = (1.5, 2.5, 5.5, 10.5)
DEFAULT_POL_FRACTIONS = (0.01, 0.02, 0.03, 0.05, 0.10, 0.20, 0.30)


@dataclass
class ResultTable:
    name: str
    columns: tuple
    rows: list  # list of dicts keyed by column name

    def to_csv(self):
        out = io.StringIO()
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_format_cell(row.get(c)) for c in self.columns) + "\n")
        return out.getvalue()

    def to_json(self):
        return json.dumps({"name": self.name,
                           "rows": [{c: row.get(c) for c in self.columns}
                                    for row in self.rows]},
                          sort_keys=True, default=_json_default)


def _format_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return "%.6g" % v
    return str(v)


def _json_default(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    raise TypeError(v)


def detect_oracle(s, p):
    """Chance that s independent uniform challenges hit deleted data."""
    return 1.0 - (1.0 - p) ** s


def recover_oracle(n, k, f):
    """Inclusion-exclusion coverage of k parts by n holders surviving at 1-f."""
    total = 0.0
    for i in range(k + 1):
        total += (-1) ** i * math.comb(k, i) * (1.0 - i * (1.0 - f) / k) ** n
    return total


def exp_detect(s_grid=DEFAULT_DETECT_S, p_grid=DEFAULT_DETECT_P, trials=2000,
               seed=0, batches_stored=10000):
    """Detection probability of a builder deleting a fraction of history.

    Per trial the builder holds batches_stored batches with an exact
    fraction deleted; the challenger draws s batch indices independently
    and uniformly (with replacement), and detection means any draw lands
    on a deleted batch.  The deleted set is canonicalized to a prefix,
    which uniform draws cannot distinguish from a random subset.
    """
    rows = []
    for s in s_grid:
        for p in p_grid:
            rng = random.Random(_cell_seed(seed, "detect", s, p))
            n_deleted = round(p * batches_stored)
            hits = 0
            for _ in range(trials):
                for _ in range(s):
                    if rng.randrange(batches_stored) < n_deleted:
                        hits += 1
                        break
            mc = hits / trials
            oracle = detect_oracle(s, n_deleted / batches_stored)
            ref = DETECT_REFERENCE.get((s, round(p, 2)))
            rows.append({
                "s": s, "p": p, "trials": trials, "mc": mc, "oracle": oracle,
                "reference": ref, "abs_diff": abs(mc - oracle),
                "abs_diff_reference": abs(mc - ref) if ref is not None else None,
            })
    return ResultTable(
        name="detect",
        columns=("s", "p", "trials", "mc", "oracle", "reference",
                 "abs_diff", "abs_diff_reference"),
        rows=rows)


def exp_recover(n_grid=(20, 50, 100), k_grid=(2, 5, 10), f_grid=(0.0, 0.3, 0.5),
                trials=2000, seed=0):
    """Full-payload recovery odds under partial storage and node failure."""
    rows = []
    for n in n_grid:
        for k in k_grid:
            for f in f_grid:
                rng = random.Random(_cell_seed(seed, "recover", n, k, f))
                ok = 0
                for _ in range(trials):
                    covered = set()
                    for _ in range(n):
                        if f == 0.0 or rng.random() >= f:
                            covered.add(rng.randrange(k))
                    if len(covered) == k:
                        ok += 1
                mc = ok / trials
                oracle = recover_oracle(n, k, f)
                rows.append({"n": n, "k": k, "f": f, "trials": trials,
                             "mc": mc, "oracle": oracle,
                             "reference": RECOVER_REFERENCE.get((n, k, f)),
                             "abs_diff": abs(mc - oracle)})
    return ResultTable(
        name="recover",
        columns=("n", "k", "f", "trials", "mc", "oracle", "reference",
                 "abs_diff"),
        rows=rows)


def exp_pol(a_grid=DEFAULT_POL_A, fraction_grid=DEFAULT_POL_FRACTIONS,
            n_proposers=1000, trials=2000, seed=0, b=1.0):
    """Difficulty penalty for colluding with a fraction of the proposers.

    Proposers sit at integer positions on a ring of circumference
    n_proposers.  Per trial a fresh colluded subset of the given fraction
    is drawn, the lucky number is drawn uniformly, and the honest and
    colluded best distances feed the ratio.  Cells report the geometric
    mean over the trials where the ratio is finite plus the fraction of
    trials in the regime where the colluded target floors to zero (no
    nonce can ever satisfy it).
    """
    rows = []
    diagnostics = {"rows_monotone": {}}
    for a in a_grid:
        params = luck_mod.DifficultyParams(a, b)
        row_means = []
        for frac in fraction_grid:
            m = max(1, round(frac * n_proposers))
            rng = random.Random(_cell_seed(seed, "pol", a, frac))
            log_sum = 0.0
            finite = 0
            inf_count = 0
            for _ in range(trials):
                colluded = rng.sample(range(n_proposers), m)
                luck_value = rng.random() * n_proposers
                # proposers sit at the integers, so the honest best distance
                # is just the distance to the nearest integer on the ring
                frac_part = luck_value % 1.0
                d_h = min(frac_part, 1.0 - frac_part)
                d_m = min(luck_mod.distance(float(j), luck_value, n_proposers)
                          for j in colluded)
                if luck_mod.in_inf_regime(params, d_m):
                    inf_count += 1
                    continue
                log_sum += luck_mod.difficulty_log_ratio(params, d_h, d_m)
                finite += 1
            geo = math.exp(log_sum / finite) if finite else math.inf
            ref = POL_REFERENCE.get((a, round(frac, 2)))
            rows.append({
                "a": a, "fraction": frac, "trials": trials,
                "geomean_ratio": geo, "inf_fraction": inf_count / trials,
                "finite_trials": finite, "reference": ref,
            })
            row_means.append(geo)
        diagnostics["rows_monotone"][a] = all(
            row_means[i] >= row_means[i + 1] - 1e-12
            for i in range(len(row_means) - 1))
    table = ResultTable(
        name="pol",
        columns=("a", "fraction", "trials", "geomean_ratio", "inf_fraction",
                 "finite_trials", "reference"),
        rows=rows)
    return table, diagnostics


def exp_cost(size_grid=(1, 64, 256, 1024, 4096, 16384, 65536, 262144, 1048576),
             backend=None):
    """Response size of the reveal backend versus the constant-size stub.

    Reveal responses carry the part itself, so their size is affine in the
    part size; the stub's proof field is fixed.  The crossover is the
    smallest part size at which the stub response is the smaller one.
    """
    if backend is None:
        from .pairing import CurveBackend
        backend = CurveBackend()
    suite = pod.HashSuite(backend.order)
    rng = random.Random(7)
    base_witness = backend.generator()
    rows = []
    crossover = None
    for size in sorted(size_grid):
        part = rng.randbytes(size)
        v = suite.h1(part)
        r = suite.h2(1, part)
        reveal = poe.PoeProof(part_index=0, value=v, eval_witness=base_witness,
                              binding=r, relation_proof=part)
        stub = poe.PoeProof(part_index=0, value=v, eval_witness=base_witness,
                            binding=r,
                            relation_proof=b"\x00" * poe.ConstantSizeRelationStub.PROOF_SIZE)
        reveal_size = len(poe.serialize_poe_proof(reveal, backend))
        stub_size = len(poe.serialize_poe_proof(stub, backend))
        if crossover is None and stub_size < reveal_size:
            crossover = size
        rows.append({"part_size": size, "reveal_bytes": reveal_size,
                     "stub_bytes": stub_size})
    table = ResultTable(name="cost",
                        columns=("part_size", "reveal_bytes", "stub_bytes"),
                        rows=rows)
    return table, crossover


def _cell_seed(seed, *parts):
    material = ":".join(str(p) for p in parts).encode()
    digest = hashlib.sha256(seed.to_bytes(8, "big", signed=True) + material).digest()
    return int.from_bytes(digest, "big")
