"""Large-order symmetric pairing backend on a supersingular curve.

The curve is E: y^2 = x^3 + x over F_q with q = 228 * p - 1 prime and
q = 3 (mod 4), which makes E supersingular with #E(F_q) = q + 1 = 228 * p.
G is the subgroup of prime order p (the BLS12-381 scalar modulus, 255 bits).
The symmetric pairing is the reduced Tate pairing composed with the
distortion map psi(x, y) = (-x, i*y), where F_{q^2} = F_q[i]/(i^2 + 1):

    e(P, Q) = f_{p,P}(psi(Q)) ^ ((q^2 - 1) / p)

Denominator elimination applies: every vertical-line factor lands in F_q
and (q - 1) divides the final exponent, so those factors vanish.  The same
argument lets the Miller loop scale its line values by arbitrary nonzero
F_q constants, which is what makes the inversion-free Jacobian form below
correct.  The final exponent factors as (q - 1) * 228, so the hard part is
a single conjugate-divide followed by a tiny power.

Group elements are affine tuples (x, y) with None as the identity; GT
values are pairs (a, b) meaning a + b*i in F_{q^2}.
"""

from .algebra import PairingBackend

# order of the pairing subgroup: the BLS12-381 scalar field modulus
P_ORDER = 52435875175126190479447740508185965837690552500527637822603658699938581184513
COFACTOR = 228
Q = COFACTOR * P_ORDER - 1

_MILLER_BITS = bin(P_ORDER)[3:]  # MSB already consumed by starting at T = P
_ELEMENT_XBYTES = (Q.bit_length() + 7) // 8  # 33
_WINDOW = 4


def _sqrt_mod_q(a):
    # q = 3 (mod 4), so a candidate root is a^((q+1)/4)
    r = pow(a, (Q + 1) // 4, Q)
    return r if r * r % Q == a % Q else None


# ---------------------------------------------------------------------------
# Jacobian point arithmetic on y^2 = x^3 + x  ((X, Y, Z) ~ (X/Z^2, Y/Z^3))
# ---------------------------------------------------------------------------

def _jdouble(pt):
    X, Y, Z = pt
    if Z == 0 or Y == 0:
        return (1, 1, 0)
    XX = X * X % Q
    YY = Y * Y % Q
    Z2 = Z * Z % Q
    M = (3 * XX + Z2 * Z2) % Q
    S = 4 * X * YY % Q
    X3 = (M * M - 2 * S) % Q
    Y3 = (M * (S - X3) - 8 * YY * YY) % Q
    Z3 = 2 * Y * Z % Q
    return (X3, Y3, Z3)


def _jadd(p1, p2):
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    if Z1 == 0:
        return p2
    if Z2 == 0:
        return p1
    Z1Z1 = Z1 * Z1 % Q
    Z2Z2 = Z2 * Z2 % Q
    U1 = X1 * Z2Z2 % Q
    U2 = X2 * Z1Z1 % Q
    S1 = Y1 * Z2 % Q * Z2Z2 % Q
    S2 = Y2 * Z1 % Q * Z1Z1 % Q
    H = (U2 - U1) % Q
    R = (S2 - S1) % Q
    if H == 0:
        if R == 0:
            return _jdouble(p1)
        return (1, 1, 0)
    HH = H * H % Q
    HHH = H * HH % Q
    V = U1 * HH % Q
    X3 = (R * R - HHH - 2 * V) % Q
    Y3 = (R * (V - X3) - S1 * HHH) % Q
    Z3 = Z1 * Z2 % Q * H % Q
    return (X3, Y3, Z3)


def _jnormalize(pt):
    X, Y, Z = pt
    if Z == 0:
        return None
    zinv = pow(Z, -1, Q)
    zinv2 = zinv * zinv % Q
    return (X * zinv2 % Q, Y * zinv2 % Q * zinv % Q)


def _to_jacobian(a):
    if a is None:
        return (1, 1, 0)
    return (a[0], a[1], 1)


def _jmul(pt, k):
    """Windowed Jacobian scalar multiple of an affine point."""
    if pt is None or k == 0:
        return (1, 1, 0)
    base = _to_jacobian(pt)
    table = [None, base]
    for _ in range(2, 1 << _WINDOW):
        table.append(_jadd(table[-1], base))
    acc = (1, 1, 0)
    ndigits = (k.bit_length() + _WINDOW - 1) // _WINDOW
    for d in range(ndigits - 1, -1, -1):
        if acc[2] != 0:
            for _ in range(_WINDOW):
                acc = _jdouble(acc)
        digit = (k >> (d * _WINDOW)) & ((1 << _WINDOW) - 1)
        if digit:
            acc = _jadd(acc, table[digit])
    return acc


# ---------------------------------------------------------------------------
# F_{q^2} helpers for the pairing target group
# ---------------------------------------------------------------------------

def _f2_mul(a, b):
    return ((a[0] * b[0] - a[1] * b[1]) % Q, (a[0] * b[1] + a[1] * b[0]) % Q)


def _f2_pow(a, k):
    r = (1, 0)
    while k:
        if k & 1:
            r = _f2_mul(r, a)
        a = _f2_mul(a, a)
        k >>= 1
    return r


def _miller(P, B):
    """f_{p,P} evaluated at psi(B), verticals dropped, lines F_q-scaled.

    Runs in Jacobian coordinates; T = m*P never hits the identity before
    the very last addition (P has prime order p), where the chord becomes
    the vertical through -P and P and is dropped like any other F_q factor.
    """
    xp, yp = P
    xb, yb = B
    fa, fb = 1, 0
    X, Y, Z = xp, yp, 1
    for bit in _MILLER_BITS:
        # tangent line at T, fused with the doubling
        XX = X * X % Q
        YY = Y * Y % Q
        Z2 = Z * Z % Q
        M = (3 * XX + Z2 * Z2) % Q
        la = (M * (xb * Z2 + X) - 2 * YY) % Q
        Z3 = 2 * Y * Z % Q
        lb = yb * Z3 % Q * Z2 % Q
        fa, fb = (fa * fa - fb * fb) % Q, 2 * fa * fb % Q
        fa, fb = (fa * la - fb * lb) % Q, (fa * lb + fb * la) % Q
        S = 4 * X * YY % Q
        X = (M * M - 2 * S) % Q
        Y = (M * (S - X) - 8 * YY * YY) % Q
        Z = Z3
        if bit == "1":
            # chord through T and P
            Z2 = Z * Z % Q
            U2 = xp * Z2 % Q
            S2 = yp * Z % Q * Z2 % Q
            H = (U2 - X) % Q
            R = (S2 - Y) % Q
            if H == 0:
                # T == -P: vertical chord, F_q-valued; T becomes the identity
                X, Y, Z = 1, 1, 0
                continue
            la = (R * (xb + xp) - yp * Z % Q * H) % Q
            lb = yb * Z % Q * H % Q
            fa, fb = (fa * la - fb * lb) % Q, (fa * lb + fb * la) % Q
            HH = H * H % Q
            HHH = H * HH % Q
            V = X * HH % Q
            X3 = (R * R - HHH - 2 * V) % Q
            Y = (R * (V - X3) - Y * HHH) % Q
            X = X3
            Z = Z * H % Q
    return fa, fb


def _final_exp(fa, fb):
    # z^((q^2-1)/p) = (z^(q-1))^228 and z^(q-1) = conj(z) / z
    norm = (fa * fa + fb * fb) % Q
    inv = pow(norm, -1, Q)
    ia, ib = fa * inv % Q, -fb * inv % Q
    za = (fa * ia + fb * ib) % Q
    zb = (fa * ib - fb * ia) % Q
    return _f2_pow((za, zb), COFACTOR)


def _find_generator():
    x = 1
    while True:
        y = _sqrt_mod_q((x * x * x + x) % Q)
        if y is not None:
            g = _jnormalize(_jmul((x, min(y, Q - y)), COFACTOR))
            if g is not None:
                return g
        x += 1


_GENERATOR = _find_generator()


def _comb_table(point):
    """Per-4-bit-digit multiples of a fixed base, for repeated scalar mults."""
    ndigits = (P_ORDER.bit_length() + _WINDOW - 1) // _WINDOW
    table = []
    base = _to_jacobian(point)
    for _ in range(ndigits):
        row = [None, base]
        for _ in range(2, 1 << _WINDOW):
            row.append(_jadd(row[-1], base))
        table.append(row)
        for _ in range(_WINDOW):
            base = _jdouble(base)
    return table


def _comb_mul(table, k):
    acc = (1, 1, 0)
    d = 0
    while k:
        digit = k & ((1 << _WINDOW) - 1)
        if digit:
            acc = _jadd(acc, table[d][digit])
        k >>= _WINDOW
        d += 1
    return acc


class CurveBackend(PairingBackend):
    """Pairing backend over the order-p subgroup of E(F_q)."""

    name = "ss228"
    order = P_ORDER
    insecure = False
    element_size = 1 + _ELEMENT_XBYTES

    def __init__(self):
        self._gen = _GENERATOR
        self._combs = {}  # fixed-base tables; the generator's is built lazily

    def generator(self):
        return self._gen

    def identity(self):
        return None

    def is_on_curve(self, a):
        if a is None:
            return True
        x, y = a
        return y * y % Q == (x * x % Q * x + x) % Q

    def precompute(self, points):
        """Build fixed-base tables for points that will be multiplied often
        (reference-string powers); pays for itself after a few dozen mults."""
        for pt in points:
            if pt is not None and pt not in self._combs:
                self._combs[pt] = _comb_table(pt)

    def _jmul_cached(self, a, k):
        if a == self._gen and a not in self._combs:
            self._combs[a] = _comb_table(a)
        table = self._combs.get(a)
        if table is not None:
            return _comb_mul(table, k)
        return _jmul(a, k)

    def add(self, a, b):
        return _jnormalize(_jadd(_to_jacobian(a), _to_jacobian(b)))

    def neg(self, a):
        if a is None:
            return None
        return (a[0], -a[1] % Q)

    def mul(self, a, k):
        k %= P_ORDER
        if a is None or k == 0:
            return None
        return _jnormalize(self._jmul_cached(a, k))

    def msm(self, scalars, elements):
        acc = (1, 1, 0)
        for k, e in zip(scalars, elements):
            k %= P_ORDER
            if e is None or k == 0:
                continue
            acc = _jadd(acc, self._jmul_cached(e, k))
        return _jnormalize(acc)

    def pairing(self, a, b):
        if a is None or b is None:
            return (1, 0)
        return _final_exp(*_miller(a, b))

    def gt_one(self):
        return (1, 0)

    def gt_pow(self, t, k):
        return _f2_pow(t, k % P_ORDER)

    def element_to_bytes(self, e):
        if e is None:
            return b"\x00" * self.element_size
        x, y = e
        flag = 2 + (y & 1)
        return bytes([flag]) + x.to_bytes(_ELEMENT_XBYTES, "big")

    def element_from_bytes(self, data):
        if len(data) != self.element_size:
            raise ValueError("bad element length")
        flag = data[0]
        if flag == 0:
            if any(data[1:]):
                raise ValueError("bad identity encoding")
            return None
        if flag not in (2, 3):
            raise ValueError("bad compression flag")
        x = int.from_bytes(data[1:], "big")
        if x >= Q:
            raise ValueError("x out of range")
        y = _sqrt_mod_q((x * x % Q * x + x) % Q)
        if y is None:
            raise ValueError("x not on curve")
        if (y & 1) != (flag & 1):
            y = Q - y
        pt = (x, y)
        # subgroup membership: reject order-dividing-228 components
        if _jnormalize(_jmul(pt, P_ORDER)) is not None:
            raise ValueError("point outside the prime-order subgroup")
        return pt
