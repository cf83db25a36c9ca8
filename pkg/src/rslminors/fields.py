"""Exact arithmetic over prime fields F_q and extension fields F_{q^m}.

Elements are plain Python integers.  A prime-field element is its value in
[0, q).  An extension-field element is an integer in [0, q**m) whose base-q
digits, least significant first, are its coordinates on the polynomial basis
(1, z, ..., z**(m-1)) where z is a root of the modulus.  This token encoding
is shared by the instance file format and by every matrix routine, so values
can be moved between the two without translation.

The default modulus of an extension field is the lexicographically smallest
monic irreducible polynomial of the requested degree: candidates are swept in
increasing order of the integer whose base-q digits are the non-leading
coefficients, and irreducibility is decided with Rabin's test.  A different
monic irreducible modulus can be supplied explicitly.

Fields with at most 2**20 elements build exponent/logarithm/Zech tables on
first use; these back both scalar arithmetic and the vectorized elimination
kernels in :mod:`rslminors.matrix`.  Larger fields fall back to polynomial
arithmetic, which is slower but has no size limit.
"""

from __future__ import annotations

import functools
import threading
from typing import Iterator, Sequence

import numpy as np

# Largest field order for which lookup tables are constructed.  Above this
# the memory cost outweighs the benefit for the matrix sizes handled here.
TABLE_LIMIT = 1 << 20


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The field of integers modulo a prime q."""

    __slots__ = ("q", "order")

    def __init__(self, q: int):
        if not _is_prime(q):
            raise ValueError(f"field characteristic must be prime, got {q}")
        self.q = q
        self.order = q

    zero = 0
    one = 1

    def validate(self, x: int) -> int:
        if not isinstance(x, int) or not 0 <= x < self.q:
            raise ValueError(f"{x!r} is not an element token of GF({self.q})")
        return x

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.q)

    def random_element(self, rng) -> int:
        return rng.randrange(self.q)

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("PrimeField", self.q))

    def __repr__(self) -> str:
        return f"PrimeField({self.q})"


# -- polynomial helpers on coefficient tuples (ascending degree, over F_q) --


def _poly_trim(p: Sequence[int]) -> tuple[int, ...]:
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return tuple(p[:i])


def _poly_mulmod(a, b, modulus, q):
    # modulus is monic of degree m; operands have degree < m
    m = len(modulus) - 1
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % q
    for d in range(len(out) - 1, m - 1, -1):
        c = out[d]
        if c == 0:
            continue
        out[d] = 0
        for j in range(m):
            out[d - m + j] = (out[d - m + j] - c * modulus[j]) % q
    return _poly_trim(out)


def _poly_powq(a, modulus, q):
    # a**q mod modulus by square and multiply on the exponent q
    result = (1,)
    base = a
    e = q
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, modulus, q)
        base = _poly_mulmod(base, base, modulus, q)
        e >>= 1
    return result


def _poly_gcd(a, b, q):
    a, b = _poly_trim(a), _poly_trim(b)
    while b:
        inv_lead = pow(b[-1], q - 2, q)
        r = list(a)
        db, da = len(b) - 1, len(r) - 1
        while da >= db and any(r):
            lead = r[da]
            if lead:
                f = (lead * inv_lead) % q
                for j in range(db + 1):
                    r[da - db + j] = (r[da - db + j] - f * b[j]) % q
            da -= 1
        a, b = b, _poly_trim(r)
    return a


def is_irreducible(modulus: Sequence[int], q: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over GF(q)."""
    modulus = tuple(c % q for c in modulus)
    m = len(modulus) - 1
    if m < 1 or modulus[-1] != 1:
        return False
    # x**(q**m) == x mod f, and gcd(x**(q**(m/p)) - x, f) == 1 for primes p|m
    x = (0, 1)
    prime_divs = []
    mm = m
    p = 2
    while p * p <= mm:
        if mm % p == 0:
            prime_divs.append(p)
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        prime_divs.append(mm)
    powers = {m // p for p in prime_divs}
    h = x
    for i in range(1, m + 1):
        h = _poly_powq(h, modulus, q)
        if i in powers:
            diff = list(h) + [0] * (2 - len(h))
            diff[1] = (diff[1] - 1) % q
            if len(_poly_gcd(diff, modulus, q)) != 1:
                return False
    # after the loop h == x**(q**m)
    diff = list(h) + [0] * (2 - len(h))
    diff[1] = (diff[1] - 1) % q
    return not _poly_trim(diff)


def default_modulus(q: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m over GF(q).

    Candidates z**m + c_{m-1} z**(m-1) + ... + c_0 are ordered by the integer
    sum(c_i * q**i), i.e. by their non-leading coefficient vector read as a
    base-q number, and the first irreducible one wins.  The sweep is
    deterministic, so two parties always agree on the field.
    """
    for c in range(q**m):
        coeffs = []
        v = c
        for _ in range(m):
            coeffs.append(v % q)
            v //= q
        candidate = tuple(coeffs) + (1,)
        if is_irreducible(candidate, q):
            return candidate
    raise RuntimeError(f"no irreducible polynomial of degree {m} over GF({q})")


class _Tables:
    """Exponent, logarithm and Zech logarithm tables of a small field."""

    __slots__ = ("exp", "log", "zech", "exp_list", "log_list", "generator")

    def __init__(self, exp, log, zech, generator):
        self.exp = exp
        self.log = log
        self.zech = zech
        self.exp_list = exp.tolist()
        self.log_list = log.tolist()
        self.generator = generator


class ExtensionField:
    """The field F_{q^m} = GF(q)[z] / (modulus)."""

    def __init__(self, q: int, m: int, modulus: Sequence[int] | None = None):
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        self.base = PrimeField(q)
        self.q = q
        self.m = m
        self.order = q**m
        if modulus is None:
            modulus = default_modulus(q, m)
        else:
            modulus = tuple(c % q for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not is_irreducible(modulus, q):
                raise ValueError(f"modulus {modulus} is reducible over GF({q})")
        self.modulus = tuple(modulus)
        self._qpow = tuple(q**i for i in range(m + 1))
        self._tables: _Tables | None = None
        self._table_lock = threading.Lock()

    zero = 0
    one = 1

    # -- encoding ----------------------------------------------------------

    def validate(self, x: int) -> int:
        if not isinstance(x, int) or not 0 <= x < self.order:
            raise ValueError(
                f"{x!r} is not an element token of GF({self.q}^{self.m})"
            )
        return x

    def unfold(self, x: int) -> tuple[int, ...]:
        """Base-q digits of x, least significant first: the coordinates of
        the element on the basis (1, z, ..., z**(m-1))."""
        q = self.q
        out = []
        for _ in range(self.m):
            out.append(x % q)
            x //= q
        return tuple(out)

    def fold(self, coords: Sequence[int]) -> int:
        if len(coords) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(coords)}")
        q = self.q
        x = 0
        for c in reversed(coords):
            x = x * q + (c % q)
        return x

    # -- arithmetic --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.q == 2:
            return a ^ b
        q = self.q
        out = 0
        shift = 1
        while a or b:
            out += ((a + b) % q) * shift
            a //= q
            b //= q
            shift *= q
        return out

    def neg(self, a: int) -> int:
        if self.q == 2:
            return a
        q = self.q
        out = 0
        shift = 1
        while a:
            out += ((q - a % q) % q) * shift
            a //= q
            shift *= q
        return out

    def sub(self, a: int, b: int) -> int:
        if self.q == 2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        t = self._tables
        if t is None and self.order <= TABLE_LIMIT:
            t = self._ensure_tables()
        if t is not None:
            if a == 0 or b == 0:
                return 0
            return t.exp_list[(t.log_list[a] + t.log_list[b]) % (self.order - 1)]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        pa = _poly_trim(self.unfold(a))
        pb = _poly_trim(self.unfold(b))
        if not pa or not pb:
            return 0
        prod = _poly_mulmod(pa, pb, self.modulus, self.q)
        return self.fold(tuple(prod) + (0,) * (self.m - len(prod)))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        t = self._tables
        if t is None and self.order <= TABLE_LIMIT:
            t = self._ensure_tables()
        if t is not None:
            return t.exp_list[(self.order - 1 - t.log_list[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def random_element(self, rng) -> int:
        return rng.randrange(self.order)

    # -- lookup tables -----------------------------------------------------

    def _mult_matrix(self, c: int) -> np.ndarray:
        """m x m matrix over GF(q) of multiplication by c on digit vectors."""
        m, q = self.m, self.q
        cols = np.zeros((m, m), dtype=np.int64)
        v = list(self.unfold(c))
        for j in range(m):
            cols[:, j] = v
            # multiply v by z and reduce
            top = v[-1]
            v = [0] + v[:-1]
            if top:
                for i in range(m):
                    v[i] = (v[i] - top * self.modulus[i]) % q
        return cols

    def _pow_poly(self, a: int, e: int) -> int:
        # table-free power, safe to call while the tables are being built
        result = 1
        base = a
        while e:
            if e & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        n = self.order - 1
        factors = []
        mm = n
        p = 2
        while p * p <= mm:
            if mm % p == 0:
                factors.append(p)
                while mm % p == 0:
                    mm //= p
            p += 1
        if mm > 1:
            factors.append(mm)
        for g in range(2, self.order):
            if all(self._pow_poly(g, n // p) != 1 for p in factors):
                return g
        raise RuntimeError("no generator found")  # unreachable for a field

    def _ensure_tables(self) -> _Tables:
        if self._tables is not None:
            return self._tables
        with self._table_lock:
            if self._tables is not None:
                return self._tables
            if self.order > TABLE_LIMIT:
                raise ValueError(f"field of order {self.order} exceeds table limit")
            q, m, Q = self.q, self.m, self.order
            g = self._find_generator()
            # exponent table by repeated doubling: digits of g**0 .. g**(Q-2)
            digits = np.zeros((Q - 1, m), dtype=np.int64)
            digits[0, 0] = 1
            size = 1
            while size < Q - 1:
                step = min(size, Q - 1 - size)
                c = self._mul_poly(int(digits[size - 1] @ self._qpow[:m]), g)
                M = self._mult_matrix(c)
                digits[size : size + step] = (digits[:step] @ M.T) % q
                size += step
            qvec = np.array(self._qpow[:m], dtype=np.int64)
            exp = digits @ qvec
            log = np.full(Q, -1, dtype=np.int64)
            log[exp] = np.arange(Q - 1, dtype=np.int64)
            if np.count_nonzero(log >= 0) != Q - 1:
                raise RuntimeError("generator order check failed")
            # Zech table: zech[d] = log(1 + g**d), -1 when 1 + g**d == 0
            low = exp % q
            plus_one = exp - low + (low + 1) % q
            zech = log[plus_one]
            self._tables = _Tables(exp, log, zech, g)
        return self._tables

    def np_tables(self) -> _Tables | None:
        """Tables for the vectorized elimination kernels, or None when the
        field is too large to tabulate."""
        if self.order > TABLE_LIMIT:
            return None
        return self._ensure_tables()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtensionField)
            and other.q == self.q
            and other.m == self.m
            and other.modulus == self.modulus
        )

    def __hash__(self) -> int:
        return hash(("ExtensionField", self.q, self.m, self.modulus))

    def __repr__(self) -> str:
        return f"ExtensionField(q={self.q}, m={self.m}, modulus={list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def prime_field(q: int) -> PrimeField:
    return PrimeField(q)


@functools.lru_cache(maxsize=None)
def extension_field(q: int, m: int, modulus: tuple[int, ...] | None = None) -> ExtensionField:
    """Shared, cached field objects so lookup tables are built once."""
    return ExtensionField(q, m, modulus)
