"""Brute-force finite models Z_n wr (Z/mZ)^k for exhaustive class checks.

The model truncates the lattice to the box (Z/mZ)^k.  Elements are encoded
as mixed-radix integers: torsion coefficients in base n over the m^k box
points (lexicographic order), then the shift in base m, so that

    index = torsion_index * m^k + shift_index.

Twisted-conjugacy classes are the orbits of the action h: x -> h x f(h^-1).
Because that map is a genuine group action, running over every h in G in a
single pass already produces whole orbits; the default implementation takes
per-element minima over the all-h image table (vectorized), and a literal
union-find over the same edge set is kept alongside for cross-checking.
Everything here is deterministic: representatives are minimal element
indices and class ids are their ranks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .group import GroupElement, GroupParams, Torsion
from .matrix import mat_vec
from .automorphism import WreathAutomorphism, InvalidAutomorphism

DEFAULT_BUDGET = 10**6
TABLE_CAP = 3000
EXHAUSTIVE_CAP = 3000
SAMPLE_PAIRS = 2000


class BudgetExceeded(RuntimeError):
    """A finite-model computation would overrun its configured budget."""


class DescentError(RuntimeError):
    """An automorphism does not descend to the requested truncation."""


class FiniteWreathGroup:
    """The finite group Z_n wr (Z/mZ)^k with indexed elements."""

    def __init__(self, modulus: int, box: int, rank: int, budget: int = DEFAULT_BUDGET):
        if modulus < 2:
            raise ValueError(f"modulus must be at least 2, got {modulus}")
        if box < 1:
            raise ValueError(f"box must be at least 1, got {box}")
        if rank < 1:
            raise ValueError(f"rank must be at least 1, got {rank}")
        self.modulus = modulus
        self.box = box
        self.rank = rank
        points = list(itertools.product(range(box), repeat=rank))
        npoints = len(points)
        if npoints > 60:
            raise BudgetExceeded(
                f"box {box}^{rank} has {npoints} points; the model order exceeds any budget"
            )
        self.points = points
        self.point_count = npoints
        self.torsion_count = modulus**npoints
        self.order = self.torsion_count * npoints
        if self.order > budget:
            raise BudgetExceeded(
                f"|G| = {modulus}^{npoints} * {npoints} = {self.order} exceeds budget {budget}"
            )
        self._point_index = {p: i for i, p in enumerate(points)}
        # permutation tables for the shift action on coefficient slots
        self._shift_perms = [
            [self._point_index[tuple((a + b) % box for a, b in zip(p, s))] for p in points]
            for s in points
        ]
        self._tables = None
        self._conjugacy = None

    # -- encoding ------------------------------------------------------------

    def encode(self, coeffs, shift) -> int:
        n = self.modulus
        t = 0
        for c in reversed(coeffs):
            t = t * n + (c % n)
        s = self._point_index[tuple(c % self.box for c in shift)]
        return t * self.point_count + s

    def decode(self, index: int):
        t, s = divmod(index, self.point_count)
        coeffs = []
        for _ in range(self.point_count):
            t, c = divmod(t, self.modulus)
            coeffs.append(c)
        return tuple(coeffs), self.points[s]

    @property
    def identity(self) -> int:
        return 0

    def generators(self) -> list[int]:
        """Origin torsion generator plus the basis shifts."""
        gens = [self.point_count]  # torsion digit 1 at the origin slot
        for i in range(self.rank):
            e = tuple(1 if j == i else 0 for j in range(self.rank))
            if e in self._point_index:
                gens.append(self._point_index[e])
        return gens

    # -- group law -------------------------------------------------------------

    def multiply(self, i: int, j: int) -> int:
        if self._tables is not None:
            return int(self._tables["cayley"][i, j])
        (c1, z1), (c2, z2) = self.decode(i), self.decode(j)
        perm = self._shift_perms[self._point_index[z1]]
        combined = list(c1)
        for idx, c in enumerate(c2):
            if c:
                tgt = perm[idx]
                combined[tgt] = (combined[tgt] + c) % self.modulus
        shift = tuple((a + b) % self.box for a, b in zip(z1, z2))
        return self.encode(combined, shift)

    def inverse(self, i: int) -> int:
        if self._tables is not None:
            return int(self._tables["inverse"][i])
        coeffs, z = self.decode(i)
        neg = tuple((-c) % self.box for c in z)
        perm = self._shift_perms[self._point_index[neg]]
        shifted = [0] * self.point_count
        for idx, c in enumerate(coeffs):
            shifted[perm[idx]] = c
        return self.encode([(-c) % self.modulus for c in shifted], neg)

    # -- vectorized tables -------------------------------------------------------

    def ensure_tables(self) -> dict:
        if self._tables is not None:
            return self._tables
        if self.order > TABLE_CAP:
            raise BudgetExceeded(
                f"|G| = {self.order} exceeds the table cap {TABLE_CAP}; "
                "class computations need the multiplication table"
            )
        n, pcount = self.modulus, self.point_count
        tcount = self.torsion_count
        d = np.arange(tcount, dtype=np.int64)
        digits = np.empty((tcount, pcount), dtype=np.int64)
        for i in range(pcount):
            digits[:, i] = d % n
            d = d // n
        wt = n ** np.arange(pcount, dtype=np.int64)
        perms = np.array(self._shift_perms, dtype=np.int64)  # (S, P)
        tshift = (digits @ wt[perms].T).T.copy()  # (S, T)
        tadd = ((digits[:, None, :] + digits[None, :, :]) % n) @ wt  # (T, T)
        tneg = ((n - digits) % n) @ wt  # (T,)
        sneg = np.array(
            [self._point_index[tuple((-c) % self.box for c in p)] for p in self.points],
            dtype=np.int64,
        )
        order = self.order
        ti = np.arange(order, dtype=np.int64) // pcount
        si = np.arange(order, dtype=np.int64) % pcount
        cayley = (
            tadd[ti[:, None], tshift[si[:, None], ti[None, :]]] * pcount
            + perms[si[:, None], si[None, :]]
        ).astype(np.int32)
        inverse = (tneg[tshift[sneg[si], ti]] * pcount + sneg[si]).astype(np.int32)
        self._tables = {
            "digits": digits,
            "wt": wt,
            "tadd": tadd,
            "tshift": tshift,
            "tneg": tneg,
            "sneg": sneg,
            "perms": perms,
            "cayley": cayley,
            "inverse": inverse,
        }
        return self._tables

    # -- bridges to the infinite group -------------------------------------------

    def element_to_group(self, index: int) -> GroupElement:
        coeffs, shift = self.decode(index)
        items = [(p, c) for p, c in zip(self.points, coeffs) if c]
        return GroupElement(Torsion(self.modulus, self.rank, items), shift)

    def group_to_index(self, g: GroupElement) -> int:
        if g.torsion.modulus != self.modulus or g.torsion.rank != self.rank:
            raise ValueError("element parameters do not match the model")
        coeffs = [0] * self.point_count
        for p, c in g.torsion.items():
            idx = self._point_index[tuple(x % self.box for x in p)]
            coeffs[idx] = (coeffs[idx] + c) % self.modulus
        return self.encode(coeffs, g.shift)

    def render(self, index: int) -> str:
        return self.element_to_group(index).render()

    def conjugacy_partition(self) -> "TwistedClassPartition":
        if self._conjugacy is None:
            self._conjugacy = twisted_classes(self, identity_automorphism(self))
        return self._conjugacy


def build_group(n: int, m: int, k: int, budget: int = DEFAULT_BUDGET) -> FiniteWreathGroup:
    return FiniteWreathGroup(n, m, k, budget=budget)


class FiniteAutomorphism:
    """Automorphism of a finite model, stored as a permutation table.

    Construction verifies bijectivity always, and multiplicativity
    exhaustively up to the table cap (seeded sampling above it).
    """

    def __init__(self, group: FiniteWreathGroup, table, provenance: str = "", check: bool = True):
        self.group = group
        self.table = np.asarray(table, dtype=np.int32)
        self.provenance = provenance
        if self.table.shape != (group.order,):
            raise ValueError("automorphism table has the wrong length")
        if check:
            self._verify()

    def _verify(self):
        group = self.group
        order = group.order
        if not np.array_equal(np.sort(self.table), np.arange(order, dtype=np.int32)):
            raise InvalidAutomorphism(f"{self.provenance or 'map'} is not a bijection")
        if order <= EXHAUSTIVE_CAP:
            cay = group.ensure_tables()["cayley"]
            lhs = self.table[cay]
            rhs = cay[self.table[:, None], self.table[None, :]]
            if not np.array_equal(lhs, rhs):
                raise InvalidAutomorphism(
                    f"{self.provenance or 'map'} is not multiplicative on the full table"
                )
        else:
            rng = random.Random(0xC0FFEE)
            for _ in range(SAMPLE_PAIRS):
                a = rng.randrange(order)
                b = rng.randrange(order)
                if self.table[group.multiply(a, b)] != group.multiply(
                    int(self.table[a]), int(self.table[b])
                ):
                    raise InvalidAutomorphism(
                        f"{self.provenance or 'map'} fails multiplicativity at ({a}, {b})"
                    )

    def __call__(self, index: int) -> int:
        return int(self.table[index])

    def twisted_by(self, g: int) -> "FiniteAutomorphism":
        """Inner twist: conjugation by g composed after this automorphism."""
        tables = self.group.ensure_tables()
        cay = tables["cayley"]
        inv = tables["inverse"]
        twisted = cay[cay[g, self.table], inv[g]]
        return FiniteAutomorphism(
            self.group, twisted, provenance=f"tw[{g}]*{self.provenance}", check=False
        )

    def shift_map(self) -> np.ndarray:
        """Induced permutation of the shift quotient (Z/mZ)^k."""
        pcount = self.group.point_count
        return self.table[np.arange(pcount)] % pcount

    def __eq__(self, other):
        return isinstance(other, FiniteAutomorphism) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())


def identity_automorphism(group: FiniteWreathGroup) -> FiniteAutomorphism:
    return FiniteAutomorphism(
        group, np.arange(group.order, dtype=np.int32), provenance="identity", check=False
    )


def descend_automorphism(aut: WreathAutomorphism, group: FiniteWreathGroup) -> FiniteAutomorphism:
    """Reduce a validated automorphism of Z_n wr Z^k to the finite model.

    Requires the cocycle obstruction to vanish: for every axis i the sum of
    the cocycle value over a full box period must reduce to zero, otherwise
    the map is not well defined on the quotient and DescentError is raised.
    The result is checked to be a genuine automorphism of the model.
    """
    report = aut.validate()
    if not report.ok:
        raise InvalidAutomorphism("; ".join(report.failures))
    if aut.params.modulus != group.modulus or aut.params.rank != group.rank:
        raise ValueError("automorphism parameters do not match the model")
    n, k, m = group.modulus, group.rank, group.box
    pcount = group.point_count

    def reduce_vec(t: Torsion) -> list[int]:
        vec = [0] * pcount
        for p, c in t.items():
            idx = group._point_index[tuple(x % m for x in p)]
            vec[idx] = (vec[idx] + c) % n
        return vec

    for i in range(k):
        step = mat_vec(aut.matrix, tuple(1 if j == i else 0 for j in range(k)))
        total = Torsion.zero(n, k)
        for j in range(m):
            total = total + aut.cocycle[i].shifted(tuple(j * c for c in step))
        if any(reduce_vec(total)):
            raise DescentError(
                f"cocycle obstruction on axis {i} does not vanish in the box of side {m}"
            )

    u_rows = [reduce_vec(aut.origin_image.shifted(mat_vec(aut.matrix, p))) for p in group.points]
    corr = [reduce_vec(aut.cocycle_value(p)) for p in group.points]
    shift_map = [
        group._point_index[tuple(c % m for c in mat_vec(aut.matrix, p))] for p in group.points
    ]

    if group.order <= TABLE_CAP:
        tables = group.ensure_tables()
        digits, wt, tadd = tables["digits"], tables["wt"], tables["tadd"]
        umat = np.array(u_rows, dtype=np.int64)
        image_digits = (digits @ umat) % n
        tu = image_digits @ wt
        corr_idx = np.array([group.encode(vec, (0,) * k) // pcount for vec in corr], dtype=np.int64)
        smap = np.array(shift_map, dtype=np.int64)
        order = group.order
        ti = np.arange(order, dtype=np.int64) // pcount
        si = np.arange(order, dtype=np.int64) % pcount
        table = (tadd[tu[ti], corr_idx[si]] * pcount + smap[si]).astype(np.int32)
    else:
        table = np.empty(group.order, dtype=np.int32)
        for idx in range(group.order):
            coeffs, shift = group.decode(idx)
            out = [0] * pcount
            for slot, c in enumerate(coeffs):
                if c:
                    row = u_rows[slot]
                    for tgt in range(pcount):
                        out[tgt] = (out[tgt] + c * row[tgt]) % n
            s = group._point_index[shift]
            out = [(a + b) % n for a, b in zip(out, corr[s])]
            table[idx] = group.encode(out, group.points[shift_map[s]])

    return FiniteAutomorphism(group, table, provenance=f"descended({aut.label()})")


# -- twisted classes -----------------------------------------------------------


@dataclass(frozen=True)
class TwistedClassPartition:
    """Partition of the model into twisted-conjugacy classes.

    `labels[i]` is the class id of element i; ids are the ranks of the
    minimal-element representatives listed in `reps`.
    """

    labels: tuple[int, ...]
    reps: tuple[int, ...]
    count: int


def twisted_classes(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> TwistedClassPartition:
    """Orbits of x -> h x aut(h^-1), uniting over every h in the group."""
    tables = group.ensure_tables()
    cay = tables["cayley"]
    inv = tables["inverse"]
    finv = aut.table[inv]
    images = cay[cay, finv[:, None]]  # images[h, g] = (h g) * aut(h^-1)
    minima = images.min(axis=0)  # the h = identity row keeps g itself
    reps = np.unique(minima)
    labels = np.searchsorted(reps, minima)
    return TwistedClassPartition(
        labels=tuple(int(x) for x in labels),
        reps=tuple(int(r) for r in reps),
        count=int(len(reps)),
    )


def twisted_classes_unionfind(
    group: FiniteWreathGroup, aut: FiniteAutomorphism
) -> TwistedClassPartition:
    """Reference implementation: union-find over all (h, g) pairs."""
    order = group.order
    parent = list(range(order))
    size = [1] * order

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]

    for h in range(order):
        fh = aut(group.inverse(h))
        for g in range(order):
            union(g, group.multiply(group.multiply(h, g), fh))

    mins: dict[int, int] = {}
    for x in range(order):
        r = find(x)
        if r not in mins or x < mins[r]:
            mins[r] = x
    reps = sorted(mins.values())
    rank = {rep: i for i, rep in enumerate(reps)}
    labels = tuple(rank[mins[find(x)]] for x in range(order))
    return TwistedClassPartition(labels=labels, reps=tuple(reps), count=len(reps))


def fixed_conjugacy_classes(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> int:
    """Number of ordinary conjugacy classes mapped to themselves by aut."""
    part = group.conjugacy_partition()
    labels = np.asarray(part.labels)
    count = 0
    for rep in part.reps:
        if labels[aut(rep)] == labels[rep]:
            count += 1
    return count


# -- verification reports --------------------------------------------------------


@dataclass(frozen=True)
class OracleCheck:
    name: str
    params: str
    passed: bool
    lhs: object
    rhs: object

    def line(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return f"CHECK {self.name} {self.params} {word} {self.lhs} {self.rhs}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def _model_params(group: FiniteWreathGroup, **extra) -> str:
    parts = [f"n={group.modulus}", f"m={group.box}", f"k={group.rank}"]
    parts.extend(f"{key}={value}" for key, value in extra.items())
    return ";".join(parts)


def verify_tbft_finite(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> OracleCheck:
    """Twisted-class count against automorphism-fixed ordinary classes."""
    lhs = twisted_classes(group, aut).count
    rhs = fixed_conjugacy_classes(group, aut)
    return OracleCheck(
        name="tbft",
        params=_model_params(group, aut=aut.provenance or "anonymous"),
        passed=(lhs == rhs),
        lhs=lhs,
        rhs=rhs,
    )


def verify_shift_invariance(
    group: FiniteWreathGroup, aut: FiniteAutomorphism, g: int
) -> list[OracleCheck]:
    """Count invariance under inner twists plus the class-level bijection."""
    tables = group.ensure_tables()
    cay = tables["cayley"]
    inv = tables["inverse"]
    base = twisted_classes(group, aut)
    twisted = twisted_classes(group, aut.twisted_by(g))
    params = _model_params(group, aut=aut.provenance or "anonymous", g=g)
    checks = [
        OracleCheck(
            "shift-count", params, base.count == twisted.count, base.count, twisted.count
        )
    ]
    # right translation by g must send classes of aut onto classes of the
    # inverse twist, one to one
    other = twisted_classes(group, aut.twisted_by(int(inv[g])))
    mapped = np.asarray(other.labels)[cay[:, g]]
    pairs = np.unique(np.asarray(base.labels).astype(np.int64) * group.order + mapped)
    checks.append(
        OracleCheck("shift-classmap", params, len(pairs) == base.count, len(pairs), base.count)
    )
    onto = len(np.unique(mapped))
    checks.append(OracleCheck("shift-onto", params, onto == other.count, onto, other.count))
    return checks


def projection_index_map(big: FiniteWreathGroup, small: FiniteWreathGroup) -> np.ndarray:
    """Elementwise coefficient reduction map between models sharing box and rank."""
    if big.box != small.box or big.rank != small.rank or big.modulus % small.modulus:
        raise ValueError("projection needs equal boxes and a dividing modulus")
    out = np.empty(big.order, dtype=np.int32)
    for idx in range(big.order):
        coeffs, shift = big.decode(idx)
        out[idx] = small.encode([c % small.modulus for c in coeffs], shift)
    return out


def verify_projection(
    big: FiniteWreathGroup,
    small: FiniteWreathGroup,
    aut_big: FiniteAutomorphism,
    aut_small: FiniteAutomorphism,
) -> list[OracleCheck]:
    """Projection compatibility: diagram, class map, and the count bound."""
    pi = projection_index_map(big, small)
    params = _model_params(big, d=small.modulus, aut=aut_big.provenance or "anonymous")
    diagram_bad = int(np.count_nonzero(aut_small.table[pi] != pi[aut_big.table]))
    checks = [OracleCheck("projection-diagram", params, diagram_bad == 0, diagram_bad, 0)]
    part_big = twisted_classes(big, aut_big)
    part_small = twisted_classes(small, aut_small)
    mapped = np.asarray(part_small.labels)[pi]
    pairs = np.unique(np.asarray(part_big.labels).astype(np.int64) * small.order + mapped)
    checks.append(
        OracleCheck(
            "projection-classmap", params, len(pairs) == part_big.count, len(pairs), part_big.count
        )
    )
    onto = len(np.unique(mapped))
    checks.append(
        OracleCheck("projection-onto", params, onto == part_small.count, onto, part_small.count)
    )
    checks.append(
        OracleCheck(
            "projection-bound",
            params,
            part_big.count >= part_small.count,
            part_big.count,
            part_small.count,
        )
    )
    return checks


def torsion_restriction_classes(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> int:
    """Twisted-class count of the restriction to the torsion subgroup.

    The subgroup is abelian, so the classes are the cosets of the image of
    x -> x - aut(x) and counting reduces to an image size.
    """
    tables = group.ensure_tables()
    digits, wt = tables["digits"], tables["wt"]
    pcount = group.point_count
    tidx = np.arange(group.torsion_count, dtype=np.int64) * pcount
    images = aut.table[tidx]
    if np.count_nonzero(images % pcount):
        raise ValueError("automorphism does not preserve the torsion subgroup")
    fprime = images // pcount
    chi = ((digits - digits[fprime]) % group.modulus) @ wt
    return group.torsion_count // len(np.unique(chi))


def verify_restriction_bound(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> list[OracleCheck]:
    """R(restriction) <= R(full map) * fixed points of the shift quotient map."""
    params = _model_params(group, aut=aut.provenance or "anonymous")
    pcount = group.point_count
    tidx = np.arange(group.torsion_count, dtype=np.int64) * pcount
    preserved_bad = int(np.count_nonzero(aut.table[tidx] % pcount))
    checks = [
        OracleCheck("restriction-preserved", params, preserved_bad == 0, preserved_bad, 0)
    ]
    if preserved_bad:
        return checks
    restricted = torsion_restriction_classes(group, aut)
    full = twisted_classes(group, aut).count
    sbar = aut.shift_map()
    fixed = int(np.count_nonzero(sbar == np.arange(pcount)))
    bound = full * fixed
    checks.append(
        OracleCheck("restriction-bound", params, restricted <= bound, restricted, bound)
    )
    return checks


# -- catalogs ---------------------------------------------------------------------


def default_matrix_set(k: int) -> list:
    from .matrix import identity as identity_matrix
    from .reidemeister import block_order_three

    mats = [identity_matrix(k), tuple(tuple(-x for x in row) for row in identity_matrix(k))]
    if k >= 2:
        mats.append(
            tuple(tuple(1 if j == (i + 1) % k else 0 for j in range(k)) for i in range(k))
        )
    if k % 2 == 0:
        mats.append(block_order_three(k))
    return mats


def zero_cocycle_automorphisms(n: int, k: int, box: int, matrices=None) -> list[WreathAutomorphism]:
    """Single-point-unit, zero-cocycle automorphisms of Z_n wr Z^k.

    Support points range over the box [0, box)^k so every entry descends to
    the matching finite model.  Deterministic order: matrix, point, unit.
    """
    from math import gcd

    params = GroupParams(n, k)
    if matrices is None:
        matrices = default_matrix_set(k)
    units = [c for c in range(1, n) if gcd(c, n) == 1]
    return [
        WreathAutomorphism(params, matrix, Torsion.delta(n, k, point, c))
        for matrix in matrices
        for point in itertools.product(range(box), repeat=k)
        for c in units
    ]


def zero_cocycle_catalog(group: FiniteWreathGroup, matrices=None) -> list[FiniteAutomorphism]:
    """Descended single-point-unit automorphisms with zero cocycle, deduplicated."""
    catalog = []
    seen = set()
    for aut in zero_cocycle_automorphisms(group.modulus, group.rank, group.box, matrices):
        descended = descend_automorphism(aut, group)
        key = descended.table.tobytes()
        if key not in seen:
            seen.add(key)
            catalog.append(descended)
    return catalog


def inner_twists(group: FiniteWreathGroup, aut: FiniteAutomorphism) -> list[FiniteAutomorphism]:
    """All inner twists of aut, deduplicated by their tables (g = identity first)."""
    out = []
    seen = set()
    for g in range(group.order):
        twisted = aut.twisted_by(g)
        key = twisted.table.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(twisted)
    return out
