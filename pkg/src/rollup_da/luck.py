"""Proof of luck: lucky-number derivation, sigmoid difficulty, nonce search.

Positions live on a ring of circumference N (one registered proposer per
unit of circumference, placed at its registry handle).  A round's lucky
number is a hash of the previous block header mapped onto the ring, and a
producer's difficulty target shrinks steeply with the ring distance
between its chosen proposer and the lucky number:

    target(d) = floor(b * 2^256 / (1 + exp(10*d - a)))

The exponential is evaluated in high-precision decimal so the floor is
exact to the unit even where the table spans dozens of orders of
magnitude; ratio queries work in log space instead and never overflow.
"""

import hashlib
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

TWO_256 = 1 << 256
_LOG_2_256 = 256 * math.log(2)


@dataclass(frozen=True)
class DifficultyParams:
    """a widens the window of viable proposers; b scales the per-attempt
    success probability of the closest one."""
    a: float
    b: float = 1.0

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("a must be positive")
        if not 0 < self.b <= 1:
            raise ValueError("b must be in (0, 1]")


def lucky_number(header_bytes, ring_size, suite):
    """Map H4(header) uniformly onto [0, ring_size)."""
    if ring_size < 1:
        raise ValueError("ring_size must be >= 1")
    u = suite.h4(header_bytes) / suite.modulus
    # guard the half-open interval against u rounding up to 1.0
    return min(u * ring_size, math.nextafter(float(ring_size), 0.0))


def distance(x, y, ring_size):
    """Circular distance on the ring, in [0, ring_size/2]."""
    d = abs(x - y) % ring_size
    return min(d, ring_size - d)


def difficulty(params, d):
    """The 256-bit target for a proposal at ring distance d, floored exactly."""
    if d < 0:
        raise ValueError("distance cannot be negative")
    exponent = 10.0 * d - params.a
    # unit-exact floor needs every digit down to 1; deeply negative
    # exponents push the correction below any fixed precision
    prec = 120 + max(0, int(-exponent * 0.4343) + 20 if exponent < 0 else 0)
    with localcontext() as ctx:
        ctx.prec = prec
        t = Decimal(10) * Decimal(d) - Decimal(params.a)
        denom = 1 + t.exp()
        target = (Decimal(params.b) * Decimal(TWO_256)) / denom
        return int(target)  # truncation == floor for nonnegative values


def check_nonce(header_bytes, nonce, target):
    """Hash(header || nonce) as a 256-bit integer, compared to the target."""
    digest = hashlib.sha256(header_bytes + (nonce % TWO_256).to_bytes(32, "big")).digest()
    return int.from_bytes(digest, "big") < target


def search_nonce(header_bytes, target, max_attempts, rng):
    """Scan nonces sequentially from a seeded start.

    Returns (nonce, attempts) with nonce None when the budget runs out.
    For an ideal hash the attempt count distribution is the same as for
    independent random nonces, but the scan replays exactly under a seed.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    if target <= 0:
        return None, max_attempts
    start = rng.getrandbits(256)
    for n in range(max_attempts):
        nonce = (start + n) % TWO_256
        if check_nonce(header_bytes, nonce, target):
            return nonce, n + 1
    return None, max_attempts


def _softplus(t):
    # log(1 + e^t), stable for any t
    return max(t, 0.0) + math.log1p(math.exp(-abs(t)))


def difficulty_log_ratio(params, d_honest, d_malicious):
    """ln of target(d_honest) / target(d_malicious), computed in log space."""
    th = 10.0 * d_honest - params.a
    tm = 10.0 * d_malicious - params.a
    return _softplus(tm) - _softplus(th)


def difficulty_ratio(params, d_honest, d_malicious):
    """How many times harder the farther proposal makes the nonce search.

    Returns math.inf when the far target floors to zero: no nonce can ever
    satisfy it, whatever the ratio of the real-valued sigmoids would be.
    """
    if difficulty(params, d_malicious) == 0:
        return math.inf
    log_ratio = difficulty_log_ratio(params, d_honest, d_malicious)
    if log_ratio > 700:  # exp would overflow a float
        return math.inf
    return math.exp(log_ratio)


def in_inf_regime(params, d):
    """True when the target at distance d floors to zero.

    Cheap log-space test with an exact Decimal fallback near the edge.
    """
    t = 10.0 * d - params.a
    edge = _LOG_2_256 + math.log(params.b)
    if t < edge - 1e-6:
        return False
    if t > edge + 1e-6:
        return True
    return difficulty(params, d) == 0
