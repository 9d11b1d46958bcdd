"""
Residue core - exact arithmetic over Z_n with factored moduli
Natural maps between moduli, CRT, Legendre and Jacobi symbols
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt, prod
from typing import List, Sequence, Tuple, Union

from services.errors import InvalidInputError, NonUnitError


MAX_MODULUS = 2 ** 64


@dataclass(frozen=True)
class FactoredModulus:
    """n together with its prime factorization, sorted by prime"""

    n: int
    factors: Tuple[Tuple[int, int], ...]
    big_omega: int
    small_omega: int

    def __post_init__(self):
        if prod(p ** r for p, r in self.factors) != self.n:
            raise InvalidInputError(f"Factors {self.factors} do not multiply to {self.n}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)) or any(r < 1 for _, r in self.factors):
            raise InvalidInputError(f"Malformed factorization {self.factors}")
        if self.big_omega != sum(r for _, r in self.factors) or self.small_omega != len(self.factors):
            raise InvalidInputError(f"Omega counts disagree with {self.factors}")

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    @property
    def primes_with_multiplicity(self) -> List[int]:
        """Primes listed with multiplicity in ascending order"""
        return [p for p, r in self.factors for _ in range(r)]

    @property
    def prime_power_components(self) -> List[int]:
        return [p ** r for p, r in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(r == 1 for _, r in self.factors)

    @property
    def is_square(self) -> bool:
        return all(r % 2 == 0 for _, r in self.factors)

    @property
    def is_odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def is_prime(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    def valuation(self, p: int) -> int:
        """v_p(n)"""
        for q, r in self.factors:
            if q == p:
                return r
        return 0

    def __str__(self) -> str:
        parts = [f"{p}^{r}" if r > 1 else str(p) for p, r in self.factors]
        return f"{self.n} = {' * '.join(parts)}"


@dataclass(frozen=True)
class Residue:
    """An element of Z_n"""

    value: int
    modulus: FactoredModulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.n:
            raise InvalidInputError(f"Residue {self.value} outside [0, {self.modulus.n})")

    @property
    def n(self) -> int:
        return self.modulus.n


ModulusLike = Union[int, FactoredModulus]
ResidueLike = Union[int, Residue]


# === FACTORIZATION ===

@lru_cache(maxsize=4096)
def factor(n: int) -> FactoredModulus:
    """Trial division up to sqrt(n)"""
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidInputError(f"Modulus must be an integer, got {n!r}")
    if n < 2:
        raise InvalidInputError(f"Modulus must be at least 2, got {n}", {'n': n})
    if n >= MAX_MODULUS:
        raise InvalidInputError(f"Modulus {n} does not fit in 64 bits", {'n': n})

    factors = []
    rest = n
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            r = 0
            while rest % p == 0:
                rest //= p
                r += 1
            factors.append((p, r))
        p += 1 if p == 2 else 2
    if rest > 1:
        factors.append((rest, 1))

    return FactoredModulus(
        n=n,
        factors=tuple(factors),
        big_omega=sum(r for _, r in factors),
        small_omega=len(factors),
    )


def as_modulus(n: ModulusLike) -> FactoredModulus:
    return n if isinstance(n, FactoredModulus) else factor(n)


def residue(value: int, n: ModulusLike) -> Residue:
    """Reduce an arbitrary integer into Z_n"""
    modulus = as_modulus(n)
    return Residue(value % modulus.n, modulus)


def is_prime(n: int) -> bool:
    return n >= 2 and factor(n).is_prime


def is_square(n: int) -> bool:
    root = isqrt(n)
    return root * root == n


def units(n: ModulusLike) -> List[int]:
    """U(n) in ascending order"""
    modulus = as_modulus(n)
    return [a for a in range(1, modulus.n) if gcd(a, modulus.n) == 1]


def euler_phi(n: ModulusLike) -> int:
    modulus = as_modulus(n)
    return prod((p - 1) * p ** (r - 1) for p, r in modulus.factors)


def divisors(n: ModulusLike) -> List[int]:
    modulus = as_modulus(n)
    result = [1]
    for p, r in modulus.factors:
        result = [d * p ** e for d in result for e in range(r + 1)]
    return sorted(result)


# === NATURAL MAPS AND CRT ===

def natural_map(a: ResidueLike, m: ModulusLike, n: ModulusLike = None) -> Residue:
    """Image of a under Z_n -> Z_m, a + nZ -> a + mZ"""
    if isinstance(a, Residue):
        source = a.modulus
        value = a.value
    else:
        if n is None:
            raise InvalidInputError("natural_map needs the source modulus for a plain integer")
        source = as_modulus(n)
        value = a % source.n
    target = as_modulus(m)
    if source.n % target.n != 0:
        raise InvalidInputError(f"{target.n} does not divide {source.n}",
                                {'n': source.n, 'm': target.n})
    return Residue(value % target.n, target)


def divide_then_map(x: int, d: int, n: ModulusLike, m: ModulusLike) -> int:
    """Image of x/d under the natural map Z_n -> Z_m, for d | x and d | n"""
    source = as_modulus(n)
    target = as_modulus(m)
    x %= source.n
    if source.n % d != 0 or x % d != 0:
        raise InvalidInputError(f"{d} must divide both {x} and {source.n}")
    if (source.n // d) % target.n != 0:
        raise InvalidInputError(f"{target.n} does not divide {source.n // d}")
    return (x // d) % target.n


def crt_combine(parts: Sequence[Residue], n: ModulusLike = None) -> Residue:
    """Glue residues modulo the prime-power components of n into one residue mod n"""
    if not parts:
        raise InvalidInputError("crt_combine needs at least one component")

    moduli = [part.modulus for part in parts]
    for modulus in moduli:
        if len(modulus.factors) != 1:
            raise InvalidInputError(f"Component modulus {modulus.n} is not a prime power")
    primes = [modulus.factors[0][0] for modulus in moduli]
    if len(set(primes)) != len(primes):
        raise InvalidInputError(f"Repeated prime among component moduli {[m.n for m in moduli]}")

    total = prod(modulus.n for modulus in moduli)
    if n is not None:
        target = as_modulus(n)
        if sorted(m.n for m in moduli) != sorted(target.prime_power_components):
            raise InvalidInputError(
                f"Components {[m.n for m in moduli]} do not match the factorization of {target.n}")
        total = target.n

    value = 0
    for part in parts:
        m = part.modulus.n
        rest = total // m
        value += part.value * rest * pow(rest, -1, m)
    return residue(value, total)


def crt_pair(b: int, m1: int, c: int, m2: int) -> int:
    """x mod m1*m2 with x = b (mod m1), x = c (mod m2), for coprime m1, m2"""
    if gcd(m1, m2) != 1:
        raise InvalidInputError(f"{m1} and {m2} are not coprime")
    return (b * m2 * pow(m2, -1, m1) + c * m1 * pow(m1, -1, m2)) % (m1 * m2)


# === SYMBOLS ===

def _plain(a: ResidueLike) -> int:
    return a.value if isinstance(a, Residue) else int(a)


def legendre(a: ResidueLike, p: int) -> int:
    """Legendre symbol of a unit modulo an odd prime, by Euler's criterion"""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise InvalidInputError(f"{p} is not an odd prime", {'p': p})
    value = _plain(a) % p
    if value == 0:
        raise NonUnitError(_plain(a), p)
    return -1 if pow(value, (p - 1) // 2, p) == p - 1 else 1


def jacobi(a: ResidueLike, n: ModulusLike) -> int:
    """Jacobi symbol from the factorization: product of (a/p_i)^(r_i)"""
    modulus = as_modulus(n)
    if not modulus.is_odd:
        raise InvalidInputError(f"Jacobi symbol needs an odd modulus, got {modulus.n}")
    value = _plain(a) % modulus.n
    if gcd(value, modulus.n) != 1:
        raise NonUnitError(_plain(a), modulus.n)
    symbol = 1
    for p, r in modulus.factors:
        if r % 2 == 1:
            symbol *= legendre(value, p)
    return symbol


def jacobi_reciprocity(a: int, n: int) -> int:
    """Binary Jacobi algorithm via quadratic reciprocity; 0 when gcd(a, n) > 1"""
    if n < 1 or n % 2 == 0:
        raise InvalidInputError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def quadratic_residues(p: int) -> List[int]:
    """Q_p, the nonzero squares modulo an odd prime"""
    if p < 3 or not is_prime(p):
        raise InvalidInputError(f"{p} is not an odd prime", {'p': p})
    return sorted({x * x % p for x in range(1, p)})
