"""Two-sided ideals of finite rings, by exhaustive search.

A ring is indexed once into numpy add/multiply tables; ideals are boolean
masks over that index.  Every search here is brute force, which is the
point: the results are meant to be trusted as oracles at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .filtered import FilteredRing, RingError, SkewData


class BudgetExceeded(RuntimeError):
    """A search would exceed the configured element or ideal budget."""


class RingTable:
    """Cayley tables of a finite ring; element i is ``elements[i]``."""

    def __init__(self, ring: FilteredRing, max_elements: int = 4096):
        if not ring.is_finite:
            raise RingError(f"{ring.name} is not finite")
        n = ring.size()
        if n > max_elements:
            raise BudgetExceeded(f"{ring.name} has {n} elements, budget is {max_elements}")
        self.ring = ring
        self.elements = list(ring.elements())
        self.index = {e: k for k, e in enumerate(self.elements)}
        self.n = n
        idx = self.index
        els = self.elements
        self.add = np.array([[idx[ring.add(a, b)] for b in els] for a in els], dtype=np.int32)
        self.mul = np.array([[idx[ring.mul(a, b)] for b in els] for a in els], dtype=np.int32)
        self.neg = np.array([idx[ring.neg(a)] for a in els], dtype=np.int32)
        self.zero = idx[ring.zero]
        self.one = idx[ring.one]
        self._ideals: dict = {}

    def map_array(self, f: Callable) -> np.ndarray:
        """An element map as an index array; raises if f leaves the ring."""
        out = np.empty(self.n, dtype=np.int32)
        for k, e in enumerate(self.elements):
            img = f(e)
            if img not in self.index:
                raise RingError(f"map sends {self.ring.format(e)} outside {self.ring.name}")
            out[k] = self.index[img]
        return out

    def mask(self, elems: Iterable) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        for e in elems:
            m[self.index[e]] = True
        return m

    def __repr__(self):
        return f"<RingTable {self.ring.name} ({self.n} elements)>"


@dataclass(frozen=True, eq=False)
class FiniteIdeal:
    """A two-sided ideal as the full set of its elements (a mask over the table)."""

    table: RingTable
    mask: np.ndarray
    generators: tuple = ()
    _key: bytes = field(default=b"", repr=False)

    @classmethod
    def from_mask(cls, table: RingTable, mask: np.ndarray, generators=()) -> FiniteIdeal:
        mask = np.asarray(mask, dtype=bool)
        mask.flags.writeable = False
        return cls(table, mask, tuple(generators), np.packbits(mask).tobytes())

    @property
    def ambient(self) -> FilteredRing:
        return self.table.ring

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def elements(self) -> list:
        return [self.table.elements[k] for k in self.indices]

    def __contains__(self, a) -> bool:
        return bool(self.mask[self.table.index[a]])

    def __eq__(self, other):
        return isinstance(other, FiniteIdeal) and other.table is self.table and other._key == self._key

    def __hash__(self):
        return hash(self._key)

    def __le__(self, other: FiniteIdeal) -> bool:
        _same(self, other)
        return not np.any(self.mask & ~other.mask)

    def __lt__(self, other: FiniteIdeal) -> bool:
        return self <= other and self != other

    @property
    def is_zero(self) -> bool:
        return self.size == 1

    @property
    def is_whole(self) -> bool:
        return bool(self.mask.all())

    def to_list(self) -> list[str]:
        """Canonical serialization: formatted elements in enumeration order."""
        R = self.ambient
        return [R.format(e) for e in self.elements]

    def __repr__(self):
        shown = ", ".join(self.to_list()[:6])
        more = ", ..." if self.size > 6 else ""
        return f"<Ideal of {self.ambient.name}: {{{shown}{more}}} ({self.size})>"


def _same(I: FiniteIdeal, J: FiniteIdeal) -> None:
    if I.table is not J.table:
        raise RingError("ideals of different rings")


def _additive_closure(table: RingTable, seeds: np.ndarray) -> np.ndarray:
    """Mask of the additive subgroup generated by the seed indices."""
    span = np.zeros(table.n, dtype=bool)
    span[table.zero] = True
    A = table.add
    for s in np.unique(seeds):
        if span[s]:
            continue
        multiples = [table.zero]
        m = s
        while m != table.zero:
            multiples.append(m)
            m = A[m, s]
        span_idx = np.flatnonzero(span)
        span[np.unique(A[np.ix_(span_idx, multiples)])] = True
    return span


def ideal_generate(table: RingTable | FilteredRing, gens: Sequence, indices: bool = False) -> FiniteIdeal:
    """Smallest two-sided ideal containing gens.

    It is the additive span of all r*g*s, which is already closed under
    two-sided multiplication.
    """
    if isinstance(table, FilteredRing):
        table = RingTable(table)
    idx = list(gens) if indices else [table.index[g] for g in gens]
    M = table.mul
    seeds = [table.zero]
    seed_arr = np.unique(np.concatenate([M[M[:, g], :].ravel() for g in idx])) if idx else np.array(seeds)
    return FiniteIdeal.from_mask(table, _additive_closure(table, seed_arr), tuple(idx))


def zero_ideal(table: RingTable) -> FiniteIdeal:
    m = np.zeros(table.n, dtype=bool)
    m[table.zero] = True
    return FiniteIdeal.from_mask(table, m)


def whole_ideal(table: RingTable) -> FiniteIdeal:
    return FiniteIdeal.from_mask(table, np.ones(table.n, dtype=bool), (table.one,))


def ideal_sum(I: FiniteIdeal, J: FiniteIdeal) -> FiniteIdeal:
    _same(I, J)
    seeds = np.concatenate([I.indices, J.indices])
    return FiniteIdeal.from_mask(I.table, _additive_closure(I.table, seeds), I.generators + J.generators)


def ideal_intersection(I: FiniteIdeal, J: FiniteIdeal) -> FiniteIdeal:
    _same(I, J)
    return FiniteIdeal.from_mask(I.table, I.mask & J.mask)


def ideal_product(I: FiniteIdeal, J: FiniteIdeal) -> FiniteIdeal:
    """Additive span of all ab, a in I, b in J (an ideal since I, J are)."""
    _same(I, J)
    prods = I.table.mul[np.ix_(I.indices, J.indices)].ravel()
    return FiniteIdeal.from_mask(I.table, _additive_closure(I.table, prods))


def ideal_ops(kind: str, I: FiniteIdeal, J: FiniteIdeal) -> FiniteIdeal:
    ops = {"product": ideal_product, "intersection": ideal_intersection, "sum": ideal_sum}
    if kind not in ops:
        raise ValueError(f"unknown ideal operation {kind!r}")
    return ops[kind](I, J)


def ideal_power(I: FiniteIdeal, ell: int) -> FiniteIdeal:
    if ell == 0:
        return whole_ideal(I.table)
    P = I
    for _ in range(ell - 1):
        P = ideal_product(P, I)
    return P


def filtration_ideal(table: RingTable) -> FiniteIdeal:
    """The distinguished ideal i of the ring, as an enumerated ideal."""
    return ideal_generate(table, list(table.ring.ideal_generators))


# ---------------------------------------------------------------------------
# enumeration


def all_ideals(table: RingTable, method: str = "sums", max_ideals: int = 20_000) -> list[FiniteIdeal]:
    """Every two-sided ideal, smallest first.

    "sums": principal ideals, then pairwise sums iterated to a fixed point
    (complete, as every ideal of a finite ring is a finite sum of principal
    ones).  "subgroups": every additive subgroup is enumerated and the
    two-sided-closed ones are kept; an independent cross-check for rings of
    at most 256 elements.
    """
    key = ("ideals", method)
    if key in table._ideals:
        return table._ideals[key]
    if method == "sums":
        found = {zero_ideal(table)}
        for g in range(table.n):
            found.add(ideal_generate(table, [g], indices=True))
        frontier = list(found)
        while frontier:
            new = set()
            current = list(found)
            for I in frontier:
                for J in current:
                    S = ideal_sum(I, J)
                    if S not in found and S not in new:
                        new.add(S)
            found |= new
            if len(found) > max_ideals:
                raise BudgetExceeded(f"more than {max_ideals} ideals")
            frontier = list(new)
    elif method == "subgroups":
        if table.n > 256:
            raise BudgetExceeded("subgroup enumeration is limited to 256 elements")
        found = set()
        for S in _all_subgroups(table, max_ideals * 20):
            if _is_two_sided(table, S):
                found.add(FiniteIdeal.from_mask(table, S))
    else:
        raise ValueError(f"unknown method {method!r}")
    result = sorted(found, key=lambda I: (I.size, I.indices.tolist()))
    table._ideals[key] = result
    return result


def _all_subgroups(table: RingTable, limit: int):
    start = np.zeros(table.n, dtype=bool)
    start[table.zero] = True
    seen = {start.tobytes()}
    stack = [start]
    while stack:
        S = stack.pop()
        yield S
        S_idx = np.flatnonzero(S)
        covered = S.copy()
        for g in range(table.n):
            if covered[g]:
                continue
            # S + g depends only on the coset g + S
            covered[table.add[g, S_idx]] = True
            T = _additive_closure(table, np.concatenate([S_idx, [g]]))
            k = T.tobytes()
            if k not in seen:
                seen.add(k)
                if len(seen) > limit:
                    raise BudgetExceeded(f"more than {limit} additive subgroups")
                stack.append(T)


def _is_two_sided(table: RingTable, S: np.ndarray) -> bool:
    idx = np.flatnonzero(S)
    M = table.mul
    return bool(S[M[:, idx]].all() and S[M[idx, :]].all())


# ---------------------------------------------------------------------------
# primality


def _require_proper(P: FiniteIdeal) -> None:
    if P.is_whole:
        raise ValueError("the whole ring is not a proper ideal")


def prime_witness(P: FiniteIdeal):
    """(a, b) outside P with aAb inside P, or None when P is prime."""
    _require_proper(P)
    M, inP = P.table.mul, P.mask
    outside = np.flatnonzero(~inP)
    for a in outside:
        # block[r, b] = (a r) b
        block = M[M[a, :], :]
        bad = inP[block].all(axis=0) & ~inP
        if bad.any():
            b = int(np.flatnonzero(bad)[0])
            return P.table.elements[a], P.table.elements[b]
    return None


def is_prime(P: FiniteIdeal) -> bool:
    return prime_witness(P) is None


def map_order(perm: np.ndarray, cap: int = 10_000) -> int:
    """Order of a permutation of the element index, by iteration."""
    ident = np.arange(len(perm))
    cur = perm.copy()
    for k in range(1, cap + 1):
        if np.array_equal(cur, ident):
            return k
        cur = perm[cur]
    raise BudgetExceeded(f"automorphism order exceeds {cap}")


def image_ideal(I: FiniteIdeal, perm: np.ndarray) -> FiniteIdeal:
    m = np.zeros(I.table.n, dtype=bool)
    m[perm[I.indices]] = True
    return FiniteIdeal.from_mask(I.table, m)


def is_stable(I: FiniteIdeal, perm: np.ndarray) -> bool:
    """perm(I) is contained in I."""
    return bool(I.mask[perm[I.indices]].all())


def alpha_prime_witness(P: FiniteIdeal, alpha: np.ndarray):
    """(x, y) outside P with alpha^n(x) A y inside P for every n, or None."""
    _require_proper(P)
    if image_ideal(P, alpha) != P:
        raise ValueError("P is not alpha-stable")
    M, inP = P.table.mul, P.mask
    order = map_order(alpha)
    powers = [np.arange(P.table.n)]
    for _ in range(order - 1):
        powers.append(alpha[powers[-1]])
    outside = np.flatnonzero(~inP)
    for x in outside:
        ok = ~inP
        for pw in powers:
            block = M[M[pw[x], :], :]
            ok = ok & inP[block].all(axis=0)
            if not ok.any():
                break
        if ok.any():
            y = int(np.flatnonzero(ok)[0])
            return P.table.elements[x], P.table.elements[y]
    return None


def is_alpha_prime(P: FiniteIdeal, alpha: np.ndarray) -> bool:
    return alpha_prime_witness(P, alpha) is None


def is_tau_delta_stable(I: FiniteIdeal, tau: np.ndarray, delta: np.ndarray) -> bool:
    """tau(I) = I and delta(I) inside I (tau is a bijection, so tau(I) <= I suffices)."""
    return is_stable(I, tau) and is_stable(I, delta)


def stable_ideals(table: RingTable, maps: Sequence[np.ndarray], method: str = "sums") -> list[FiniteIdeal]:
    return [I for I in all_ideals(table, method) if all(is_stable(I, f) for f in maps)]


def family_prime_witness(Q: FiniteIdeal, family: Sequence[FiniteIdeal]):
    """(J, K) from the family, both strictly over Q, with JK inside Q; None if Q is prime for the family.

    Restricting to J, K containing Q loses nothing: JK <= Q implies
    (J+Q)(K+Q) <= Q, and J+Q is again in any family closed under sums.
    """
    _require_proper(Q)
    over = [J for J in family if Q < J]
    for J, K in itertools.product(over, repeat=2):
        if ideal_product(J, K) <= Q:
            return J, K
    return None


def is_tau_delta_prime(Q: FiniteIdeal, tau: np.ndarray, delta: np.ndarray, method: str = "sums") -> bool:
    if Q.is_whole or not is_tau_delta_stable(Q, tau, delta):
        return False
    return family_prime_witness(Q, stable_ideals(Q.table, [tau, delta], method)) is None


def is_tau_prime(P: FiniteIdeal, tau: np.ndarray, method: str = "sums") -> bool:
    """tau-prime in the ideal sense: tau-stable, and prime among tau-stable ideals."""
    if P.is_whole or not is_stable(P, tau):
        return False
    return family_prime_witness(P, stable_ideals(P.table, [tau], method)) is None


def primes(table: RingTable, method: str = "sums") -> list[FiniteIdeal]:
    return [P for P in all_ideals(table, method) if not P.is_whole and is_prime(P)]


def minimal_primes_over(I: FiniteIdeal, method: str = "sums") -> list[FiniteIdeal]:
    over = [P for P in primes(I.table, method) if I <= P]
    return [P for P in over if not any(Q < P for Q in over)]


@dataclass
class OrbitDecomposition:
    ideal: FiniteIdeal
    orbit: list[FiniteIdeal]
    intersection_matches: bool
    orbit_is_minimal_primes: bool

    @property
    def t(self) -> int:
        return len(self.orbit)

    @property
    def ok(self) -> bool:
        return self.intersection_matches and self.orbit_is_minimal_primes


def alpha_orbit(P: FiniteIdeal, alpha: np.ndarray) -> list[FiniteIdeal]:
    orbit = [P]
    while True:
        nxt = image_ideal(orbit[-1], alpha)
        if nxt == P:
            return orbit
        orbit.append(nxt)


def tau_orbit_decomposition(P: FiniteIdeal, alpha: np.ndarray, method: str = "sums") -> OrbitDecomposition:
    """Write an alpha-prime P as the intersection of one alpha-orbit of primes.

    The orbit is generated from any minimal prime over P; the result records
    whether its intersection is P and whether it exhausts the minimal primes.
    """
    witness = alpha_prime_witness(P, alpha)
    if witness is not None:
        raise ValueError(f"not alpha-prime: witness {witness}")
    mins = minimal_primes_over(P, method)
    if not mins:
        raise ValueError("no prime contains P")
    orbit = alpha_orbit(mins[0], alpha)
    meet = orbit[0]
    for Q in orbit[1:]:
        meet = ideal_intersection(meet, Q)
    return OrbitDecomposition(P, orbit, meet == P, set(orbit) == set(mins))


def forms_single_orbit(ideals: Sequence[FiniteIdeal], alpha: np.ndarray) -> bool:
    if not ideals:
        return False
    return set(alpha_orbit(ideals[0], alpha)) == set(ideals)


# ---------------------------------------------------------------------------
# base ring versus truncated series ring


class SeriesLab:
    """Ideal tables for R/i^N and T/j^N over the same skew data.

    ``tau``/``delta`` act on R/i^N; ``ext_tau`` is tau extended to T by
    tau(y) = q^-1 y.
    """

    def __init__(self, T, max_elements: int = 4096):
        from .series import SeriesRing

        if not isinstance(T, SeriesRing):
            raise TypeError("need a SeriesRing")
        self.T = T
        self.N = T.N
        skew = T.skew
        self.R = skew.ring.truncation(T.N)
        self.skew_R: SkewData = skew.reduced(T.N)
        self.base = RingTable(self.R, max_elements)
        self.top = RingTable(T, max_elements)
        self.tau = self.base.map_array(self.skew_R.tau)
        self.delta = self.base.map_array(self.skew_R.delta)
        self.ext_tau = self.top.map_array(T.extended_tau()) if skew.q is not None else None
        self.const = np.array([self.top.index[T.constant(a)] for a in self.base.elements], dtype=np.int32)

    def tau_delta_ideals(self, method: str = "sums") -> list[FiniteIdeal]:
        return stable_ideals(self.base, [self.tau, self.delta], method)

    def tau_ideals_top(self, method: str = "sums") -> list[FiniteIdeal]:
        return stable_ideals(self.top, [self.ext_tau], method)


def stability_witness(I: FiniteIdeal, tau: np.ndarray, delta: np.ndarray):
    for name, f in (("tau", tau), ("delta", delta)):
        out = ~I.mask[f[I.indices]]
        if out.any():
            return name, I.table.elements[int(I.indices[np.flatnonzero(out)[0]])]
    return None


@dataclass
class InducedIdeal:
    ideal: FiniteIdeal
    left_set: FiniteIdeal
    generated: FiniteIdeal
    right_set: FiniteIdeal

    @property
    def three_way_equal(self) -> bool:
        return self.left_set == self.generated == self.right_set


def induced_ideal_truncated(lab: SeriesLab, Q: FiniteIdeal) -> InducedIdeal:
    """QT in T/j^N: series whose coefficient k lies in the image of Q mod i^(N-k).

    Also builds the ideal generated by Q and the right-coefficient version,
    for comparison.
    """
    from .series import TruncSeries

    if Q.table is not lab.base:
        raise RingError("Q must be an ideal of R/i^N from this lab")
    w = stability_witness(Q, lab.tau, lab.delta)
    if w is not None:
        raise ValueError(f"Q is not a tau-delta-ideal: {w[0]} moves {lab.R.format(w[1])} out of Q")
    T, N, B = lab.T, lab.N, lab.T.base
    pools = [sorted({B.reduce(a, N - k) for a in Q.elements}, key=repr) for k in range(N)]
    left, right = [], []
    for combo in itertools.product(*pools):
        left.append(tuple(combo))
        right.append(TruncSeries(T, tuple(combo), "right").as_side("left").coeffs)
    left_I = FiniteIdeal.from_mask(lab.top, lab.top.mask(left))
    right_I = FiniteIdeal.from_mask(lab.top, lab.top.mask(right))
    generated = ideal_generate(lab.top, lab.const[Q.indices].tolist(), indices=True)
    return InducedIdeal(left_I, left_I, generated, right_I)


@dataclass
class Contraction:
    ideal: FiniteIdeal
    tau_stable_above: bool | None
    tau_delta_stable: bool
    commutator_in_ideal: bool | None


def contract(lab: SeriesLab, I: FiniteIdeal) -> Contraction:
    """I meet R, as an ideal of R/i^N.

    If I is stable under the extended tau, the contraction must be a
    tau-delta-ideal; the check goes through y a - tau(a) y = delta(a).
    """
    if I.table is not lab.top:
        raise RingError("I must be an ideal of T/j^N from this lab")
    J = FiniteIdeal.from_mask(lab.base, I.mask[lab.const])
    stable_above = None if lab.ext_tau is None else is_stable(I, lab.ext_tau)
    commutator = None
    if stable_above:
        T, top = lab.T, lab.top
        y = T.y
        commutator = all(
            I.mask[top.index[T.sub(T.mul(y, T.constant(a)), T.mul(T.constant(lab.skew_R.tau(a)), y))]]
            for a in J.elements
        )
    return Contraction(J, stable_above, is_tau_delta_stable(J, lab.tau, lab.delta), commutator)


def conjugation_perm(lab: SeriesLab) -> np.ndarray:
    """Index permutation of T/j^N given by f -> z f z^-1, z = 1 + y."""
    from .series import TruncSeries, conjugate_by_z

    T = lab.T
    return lab.top.map_array(lambda a: conjugate_by_z(TruncSeries(T, a)).coeffs)
