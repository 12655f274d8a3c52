"""Prime-field scalars, polynomials, and the pairing-group backend interface.

Scalars are plain Python ints reduced mod the backend's group order.
Polynomials are lists of ints, index = power, trailing zeros trimmed so
equality is structural.  The zero polynomial is the empty list.
"""


class DuplicateXError(ValueError):
    """Two interpolation nodes share an x-coordinate."""


class EmptyPointsError(ValueError):
    """Interpolation called with no points."""


class PrimeField:
    """Arithmetic mod a prime, plus the polynomial operations built on it."""

    def __init__(self, modulus):
        self.modulus = modulus

    def add(self, x, y):
        return (x + y) % self.modulus

    def sub(self, x, y):
        return (x - y) % self.modulus

    def mul(self, x, y):
        return (x * y) % self.modulus

    def inv(self, x):
        return pow(x, -1, self.modulus)

    def poly_trim(self, coeffs):
        n = len(coeffs)
        while n > 0 and coeffs[n - 1] % self.modulus == 0:
            n -= 1
        return [c % self.modulus for c in coeffs[:n]]

    def poly_eval(self, coeffs, x):
        """Horner evaluation of the polynomial at x."""
        y = 0
        for c in reversed(coeffs):
            y = (y * x + c) % self.modulus
        return y

    def poly_add(self, a, b):
        n = max(len(a), len(b))
        out = [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % self.modulus
               for i in range(n)]
        return self.poly_trim(out)

    def poly_sub(self, a, b):
        n = max(len(a), len(b))
        out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % self.modulus
               for i in range(n)]
        return self.poly_trim(out)

    def poly_mul(self, a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return self.poly_trim(out)

    def poly_div_linear(self, coeffs, i):
        """Quotient q(x) = (phi(x) - phi(i)) / (x - i), by synthetic division.

        Exact by construction: the remainder phi(i) is subtracted implicitly,
        so q(x) * (x - i) + phi(i) == phi(x) holds coefficient-wise.
        """
        coeffs = self.poly_trim(coeffs)
        if len(coeffs) <= 1:
            return []
        n = len(coeffs) - 1
        q = [0] * n
        q[n - 1] = coeffs[n]
        for j in range(n - 1, 0, -1):
            q[j - 1] = (coeffs[j] + i * q[j]) % self.modulus
        return self.poly_trim(q)

    def interpolate(self, points):
        """Lagrange interpolation through (x, y) pairs with distinct x.

        O(k^2); k stays small in this system so no FFT is needed.
        """
        if not points:
            raise EmptyPointsError("no points to interpolate")
        xs = [x % self.modulus for x, _ in points]
        if len(set(xs)) != len(xs):
            raise DuplicateXError("interpolation nodes must be distinct")
        ys = [y % self.modulus for _, y in points]
        # master numerator prod (x - x_j), then per-node numerator by division
        master = [1]
        for x in xs:
            master = self.poly_mul(master, [-x % self.modulus, 1])
        out = []
        for x, y in zip(xs, ys):
            num = self.poly_div_linear(master, x)
            denom = self.poly_eval(num, x)
            scale = self.mul(y, self.inv(denom))
            term = [self.mul(c, scale) for c in num]
            out = self.poly_add(out, term)
        return self.poly_trim(out)


class PairingBackend:
    """A cyclic group of prime order with a symmetric bilinear pairing.

    Group elements are opaque, hashable values with structural equality;
    the identity compares equal across calls.  GT values are opaque with
    structural equality as well.  Implementations must be stateless after
    construction so instances can be shared across threads.
    """

    name = "abstract"
    order = None
    insecure = False

    def generator(self):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, k):
        """Scalar multiple k * a (k an int, reduced mod the group order)."""
        raise NotImplementedError

    def msm(self, scalars, elements):
        """Sum of scalar multiples; backends may batch the normalization."""
        acc = self.identity()
        for k, e in zip(scalars, elements):
            acc = self.add(acc, self.mul(e, k))
        return acc

    def precompute(self, points):
        """Hint that these bases will be multiplied repeatedly; optional."""

    def pairing(self, a, b):
        raise NotImplementedError

    def gt_one(self):
        raise NotImplementedError

    def gt_pow(self, t, k):
        raise NotImplementedError

    element_size = None

    def element_to_bytes(self, e):
        raise NotImplementedError

    def element_from_bytes(self, data):
        raise NotImplementedError

    @property
    def field(self):
        f = getattr(self, "_field", None)
        if f is None:
            f = self._field = PrimeField(self.order)
        return f


class ToyBackend(PairingBackend):
    """Exhaustively testable backend: elements stored as their discrete logs.

    INSECURE by construction (the log of every element is in plain sight);
    exists so oracle tests can check group/pairing laws by integer
    arithmetic.  An element x stands for g^x; the group op is addition of
    logs mod q; pairing(g^a, g^b) = e(g,g)^(a*b) is represented by the
    exponent a*b mod q.
    """

    name = "toy"
    insecure = True

    def __init__(self, order=7919):
        self.order = order

    def generator(self):
        return 1

    def identity(self):
        return 0

    def add(self, a, b):
        return (a + b) % self.order

    def neg(self, a):
        return -a % self.order

    def mul(self, a, k):
        return a * k % self.order

    def pairing(self, a, b):
        return a * b % self.order

    def gt_one(self):
        return 0

    def gt_pow(self, t, k):
        return t * k % self.order

    element_size = 4

    def element_to_bytes(self, e):
        return int(e).to_bytes(4, "big")

    def element_from_bytes(self, data):
        if len(data) != 4:
            raise ValueError("toy element must be 4 bytes")
        e = int.from_bytes(data, "big")
        if e >= self.order:
            raise ValueError("toy element out of range")
        return e
