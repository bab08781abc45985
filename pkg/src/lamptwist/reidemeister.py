"""Reidemeister numbers for Z_n wr Z^k and the machinery behind them.

The pipeline: the lattice quotient count comes from the Smith normal form
of (I - M); a surjectivity certificate for (1 - torsion restriction)
upgrades that count to the full group when available; otherwise the result
is reported as unknown (never silently promoted to infinite).

Certificates are produced by an orbit-uniform argument that applies when
the lattice matrix has finite order and the origin image is a single
scaled generator: preimages of generators are supported on affine orbits
and solve by geometric progressions whose denominators (1 - c^t) must be
invertible for every orbit length t.  A bounded box solver provides
best-effort witnesses outside that regime, but never certifies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

from .automorphism import (
    WreathAutomorphism,
    automorphism_from_dict,
    automorphism_to_dict,
)
from .fileformat import SCHEMA_VERSION, check_schema
from .group import GroupParams, Point, Torsion
from .matrix import (
    IntMatrix,
    as_matrix,
    identity as identity_matrix,
    is_unimodular,
    mat_mul,
    mat_pow,
    mat_sub,
    mat_vec,
    matrix_order,
    smith_normal_form,
    transpose,
)
from .modular import crt, divisors, factorize, modinv, solve_linear

CERTIFICATE_KIND = "surjectivity-certificate"
DEFAULT_BOX_RADIUS = 8


@dataclass(frozen=True)
class ExtNat:
    """Nonnegative count extended by an absorbing infinite value (None)."""

    value: int | None

    @classmethod
    def of(cls, v: int) -> "ExtNat":
        return cls(int(v))

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __mul__(self, other: "ExtNat") -> "ExtNat":
        if self.value is None or other.value is None:
            return INFINITE
        return ExtNat(self.value * other.value)

    def __str__(self):
        return "infinite" if self.value is None else str(self.value)


INFINITE = ExtNat(None)


def reidemeister_abelian(matrix: IntMatrix) -> ExtNat:
    """Twisted-class count of a unimodular lattice map: index of Im(1 - M)."""
    matrix = as_matrix(matrix)
    if not is_unimodular(matrix):
        raise ValueError("lattice map must be unimodular")
    diag = smith_normal_form(mat_sub(identity_matrix(len(matrix)), matrix)).diagonal()
    if any(d == 0 for d in diag):
        return INFINITE
    out = 1
    for d in diag:
        out *= d
    return ExtNat(out)


def count_fixed_lattice_characters(matrix: IntMatrix) -> ExtNat:
    """Characters of Z^k fixed by precomposition: solutions of (M^T - I)x in Z^k."""
    matrix = as_matrix(matrix)
    if not is_unimodular(matrix):
        raise ValueError("lattice map must be unimodular")
    diag = smith_normal_form(
        mat_sub(transpose(matrix), identity_matrix(len(matrix)))
    ).diagonal()
    if any(d == 0 for d in diag):
        return INFINITE
    out = 1
    for d in diag:
        out *= abs(d)
    return ExtNat(out)


def matrix_fixed_points_mod(matrix: IntMatrix, box: int) -> int:
    """Number of z in (Z/box)^k with M z = z, via the Smith form of M - I."""
    matrix = as_matrix(matrix)
    if box < 1:
        raise ValueError(f"box must be at least 1, got {box}")
    diag = smith_normal_form(mat_sub(matrix, identity_matrix(len(matrix)))).diagonal()
    out = 1
    for d in diag:
        out *= gcd(d, box) if d else box
    return out


# -- surjectivity certificates -------------------------------------------------


@dataclass(frozen=True, eq=True)
class PreimageTemplate:
    """Uniform recipe for preimages of generators under (1 - restriction).

    Valid when the lattice matrix has finite order and the origin image is
    coeff * D[offset]: the preimage of the generator at z is the geometric
    progression coeff^j / (1 - coeff^t) along the affine orbit of z, where
    t is the orbit length.  `inverses` maps every possible orbit length to
    the inverse of (1 - coeff^t) mod n.
    """

    coeff: int
    offset: Point
    order: int
    inverses: tuple[tuple[int, int], ...]

    def inverse_for(self, length: int) -> int | None:
        return dict(self.inverses).get(length)


@dataclass
class SurjectivityCertificate:
    automorphism: WreathAutomorphism
    certified: bool
    witnesses: dict[Point, Torsion]
    radius: int
    template: PreimageTemplate | None = None
    notes: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return "certified" if self.certified else "unknown"

    def preimage(self, z) -> Torsion:
        """Preimage of the generator at z (template first, stored witness second)."""
        z = tuple(int(c) for c in z)
        if self.template is not None:
            sigma = template_preimage(self.automorphism, self.template, z)
            if sigma is not None:
                return sigma
        if z in self.witnesses:
            return self.witnesses[z]
        raise ValueError(f"certificate holds no preimage for generator at {z}")


def restriction_difference(aut: WreathAutomorphism, sigma: Torsion) -> Torsion:
    """(1 - torsion restriction) applied to sigma."""
    return sigma - aut.on_torsion(sigma)


def _affine_orbit(matrix, offset, z, cap):
    """Orbit of z under x -> M x + offset, or None if it does not close by cap."""
    orbit = [z]
    x = z
    for _ in range(cap):
        x = tuple(a + b for a, b in zip(mat_vec(matrix, x), offset))
        if x == z:
            return orbit
        orbit.append(x)
    return None


def template_preimage(aut: WreathAutomorphism, template: PreimageTemplate, z) -> Torsion | None:
    """Instantiate the orbit template at z; None when the orbit length lacks an inverse."""
    n, k = aut.params.modulus, aut.params.rank
    z = tuple(int(c) for c in z)
    orbit = _affine_orbit(aut.matrix, template.offset, z, template.order)
    if orbit is None:
        return None
    x0 = template.inverse_for(len(orbit))
    if x0 is None:
        return None
    items = []
    c_pow = 1
    for pt in orbit:
        items.append((pt, c_pow * x0))
        c_pow = (c_pow * template.coeff) % n
    return Torsion(n, k, items)


BOX_CELL_CAP = 50  # bounds solver cost; a box never exceeds this many cells


def _box_schedule(radius: int, k: int) -> list[int]:
    """Radii to try: doubling steps up to `radius`, clamped by the cell cap."""
    cap = 1
    while (2 * (cap + 1) + 1) ** k <= BOX_CELL_CAP:
        cap += 1
    radii = []
    r = 1
    while r < radius:
        radii.append(r)
        r *= 2
    radii.append(radius)
    return sorted({min(r, cap) for r in radii})


def _box_preimage(aut: WreathAutomorphism, z, radius: int) -> Torsion | None:
    """Best-effort solve of (1 - restriction)(sigma) = generator at z on a box.

    The box is grown along a doubling schedule and its cell count is capped
    independently of `radius`, so a hopeless search stays cheap in higher
    ranks; rank-1 boxes are small enough that the radius is honored fully.
    """
    n, k = aut.params.modulus, aut.params.rank
    target = Torsion.delta(n, k, z)
    for r in _box_schedule(radius, k):
        cells = itertools.product(range(-r, r + 1), repeat=k)
        support = sorted({pt for cell in cells for pt in (cell, tuple(a + b for a, b in zip(cell, z)))})
        columns = [restriction_difference(aut, Torsion.delta(n, k, pt)) for pt in support]
        eq_points = sorted({q for col in columns for q, _ in col.items()} | {tuple(z)})
        rows = [[col.coeff(q) for col in columns] for q in eq_points]
        rhs = [target.coeff(q) for q in eq_points]
        sol = solve_linear(rows, rhs, n)
        if sol is not None:
            sigma = Torsion(n, k, zip(support, sol))
            if restriction_difference(aut, sigma) == target:
                return sigma
    return None


def default_test_points(rank: int) -> list[Point]:
    pts = {(0,) * rank}
    for i in range(rank):
        e = tuple(1 if j == i else 0 for j in range(rank))
        pts.add(e)
        pts.add(tuple(-c for c in e))
    return sorted(pts)


def restriction_surjectivity(
    aut: WreathAutomorphism,
    radius: int = DEFAULT_BOX_RADIUS,
    test_points=None,
) -> SurjectivityCertificate:
    """Certificate that (1 - torsion restriction) hits every generator.

    Certified only under the orbit-uniform argument: finite-order lattice
    part, single-point origin image, and (1 - coeff^t) invertible for every
    divisor t of the orbit-map order.  Outside that regime the status is
    unknown, with box-solved witnesses recorded when they exist.
    """
    aut._require_valid()
    n, k = aut.params.modulus, aut.params.rank
    if test_points is None:
        test_points = default_test_points(k)
    test_points = sorted(tuple(int(c) for c in z) for z in test_points)
    notes = []
    template = None

    items = aut.origin_image.items()
    if len(items) == 1:
        (offset, coeff), = items
        order = matrix_order(aut.matrix)
        if order is None:
            notes.append("lattice map has no finite order within the search cap")
        else:
            # translation part of the orbit map iterated `order` times
            power_sum = [0] * k
            acc = identity_matrix(k)
            for _ in range(order):
                step = mat_vec(acc, offset)
                power_sum = [a + b for a, b in zip(power_sum, step)]
                acc = mat_mul(acc, aut.matrix)
            if any(power_sum):
                notes.append("orbit map translation part does not close; orbits are infinite")
            else:
                inverses = []
                missing = []
                for t in divisors(order):
                    inv = modinv((1 - pow(coeff, t, n)) % n, n)
                    if inv is None:
                        missing.append(t)
                    else:
                        inverses.append((t, inv))
                if missing:
                    notes.append(
                        "no inverse of (1 - c^t) mod "
                        f"{n} for orbit lengths {missing}; template incomplete"
                    )
                else:
                    template = PreimageTemplate(coeff % n, offset, order, tuple(inverses))
    else:
        notes.append("origin image has multi-point support; orbit template unavailable")

    witnesses: dict[Point, Torsion] = {}
    all_verified = True
    for z in test_points:
        sigma = None
        if template is not None:
            sigma = template_preimage(aut, template, z)
        if sigma is None:
            sigma = _box_preimage(aut, z, radius)
        if sigma is not None and restriction_difference(aut, sigma) == Torsion.delta(n, k, z):
            witnesses[z] = sigma
        else:
            all_verified = False
            notes.append(f"no verified preimage for generator at {z}")

    certified = template is not None and all_verified and bool(witnesses)
    return SurjectivityCertificate(
        automorphism=aut,
        certified=certified,
        witnesses=witnesses,
        radius=radius,
        template=template,
        notes=tuple(notes),
    )


# -- constructive CRT lifting --------------------------------------------------


def crt_lift_preimage(
    aut: WreathAutomorphism,
    z,
    cert_first: SurjectivityCertificate,
    cert_second: SurjectivityCertificate | None = None,
) -> Torsion:
    """Preimage of the generator at z over a composite modulus n*m.

    Uses a certified preimage over the first factor, measures the defect of
    its coefficient-preserving re-embedding, and corrects with a certified
    preimage of the defect over the second factor.  `cert_second=None`
    handles the trivial split m=1.  The result is verified exactly.
    """
    big = aut.params.modulus
    k = aut.params.rank
    z = tuple(int(c) for c in z)
    n = cert_first.automorphism.params.modulus
    m = 1 if cert_second is None else cert_second.automorphism.params.modulus
    if n * m != big:
        raise ValueError(f"split {n} * {m} does not match modulus {big}")
    if not cert_first.certified or (cert_second is not None and not cert_second.certified):
        raise ValueError("both factor certificates must be certified")
    if cert_first.automorphism != aut.induce(n):
        raise ValueError("first certificate does not match the induced automorphism")
    if cert_second is not None and cert_second.automorphism != aut.induce(m):
        raise ValueError("second certificate does not match the induced automorphism")

    eta1 = cert_first.preimage(z)
    sigma = eta1.embedded(big)
    target = Torsion.delta(big, k, z)
    defect = restriction_difference(aut, sigma) - target
    if cert_second is not None:
        theta = defect.exact_div(n)  # guaranteed by the projection identity
        reduced = theta.project(m)
        eta2 = Torsion.zero(m, k)
        for pt, c in reduced.items():
            eta2 = eta2 + cert_second.preimage(pt).scaled(c)
        sigma = sigma - eta2.embedded(big).scaled(n)
    if restriction_difference(aut, sigma) != target:
        raise AssertionError("lifted preimage failed exact verification")
    return sigma


# -- classification and the full pipeline --------------------------------------


_BLOCK = ((0, 1), (-1, -1))  # order 3, det 1


def block_order_three(rank: int) -> IntMatrix:
    """Block-diagonal lattice map of order 3 built from 2x2 blocks (even rank)."""
    if rank % 2:
        raise ValueError("order-3 block matrix needs an even rank")
    half = rank // 2
    rows = []
    for b in range(half):
        for r in range(2):
            row = [0] * rank
            row[2 * b] = _BLOCK[r][0]
            row[2 * b + 1] = _BLOCK[r][1]
            rows.append(row)
    return as_matrix(rows)


def _orbit_multiplier(n: int) -> int:
    """CRT multiplier: 3 mod the 7-part of n, 2 mod every other prime power."""
    x, _ = crt((3 if p == 7 else 2, p**s) for p, s in sorted(factorize(n).items()))
    return x


def finite_reidemeister_automorphism(n: int, k: int) -> WreathAutomorphism:
    """An automorphism of Z_n wr Z^k with finite Reidemeister number.

    Exists exactly when n is odd and (n is coprime to 3 or k is even).
    gcd(n, 6) = 1: doubling origin image with lattice inversion, any rank.
    Otherwise (n odd, 3 | n, k even): order-3 block lattice map with a CRT
    multiplier handling the 7-part separately.
    """
    params = GroupParams(n, k)
    if n % 2 == 0 or (n % 3 == 0 and k % 2 == 1):
        raise ValueError(f"every automorphism of Z_{n} wr Z^{k} has infinite Reidemeister number")
    if gcd(n, 6) == 1:
        matrix = tuple(tuple(-1 if i == j else 0 for j in range(k)) for i in range(k))
        mult = 2
    else:
        matrix = block_order_three(k)
        mult = _orbit_multiplier(n)
    return WreathAutomorphism(params, matrix, Torsion.delta(n, k, (0,) * k, mult))


@dataclass(frozen=True)
class Classification:
    modulus: int
    rank: int
    always_infinite: bool
    reason: str | None = None
    automorphism: WreathAutomorphism | None = None
    reidemeister: int | None = None


def classify_r_infinity(n: int, k: int) -> Classification:
    """Decide whether every automorphism of Z_n wr Z^k has infinite Reidemeister number."""
    GroupParams(n, k)  # validates the inputs
    if n % 2 == 0:
        return Classification(n, k, True, reason="modulus is even")
    if n % 3 == 0 and k % 2 == 1:
        return Classification(n, k, True, reason="modulus divisible by 3 and rank odd")
    aut = finite_reidemeister_automorphism(n, k)
    result = reidemeister_number(aut)
    if result.value is None or not result.value.is_finite:
        raise AssertionError("constructed automorphism failed to certify a finite count")
    return Classification(n, k, False, automorphism=aut, reidemeister=result.value.value)


@dataclass
class ReidemeisterResult:
    quotient: ExtNat
    certificate: SurjectivityCertificate | None
    value: ExtNat | None  # None encodes unknown

    @property
    def is_unknown(self) -> bool:
        return self.value is None

    def describe(self) -> str:
        return "unknown" if self.value is None else str(self.value)


def reidemeister_number(
    aut: WreathAutomorphism,
    radius: int = DEFAULT_BOX_RADIUS,
    test_points=None,
) -> ReidemeisterResult:
    """Full-group Reidemeister count.

    Infinite when the lattice quotient count is infinite; equal to the
    quotient count when the restriction certificate is certified (the
    projection onto the lattice is then class-bijective); unknown otherwise.
    """
    quotient = reidemeister_abelian(aut.matrix)
    if not quotient.is_finite:
        return ReidemeisterResult(quotient, None, INFINITE)
    cert = restriction_surjectivity(aut, radius=radius, test_points=test_points)
    if cert.certified:
        return ReidemeisterResult(quotient, cert, quotient)
    return ReidemeisterResult(quotient, cert, None)


# -- certificate serialization --------------------------------------------------


def certificate_to_dict(cert: SurjectivityCertificate) -> dict:
    from .automorphism import _torsion_to_list

    template = None
    if cert.template is not None:
        template = {
            "coeff": cert.template.coeff,
            "point": list(cert.template.offset),
            "order": cert.template.order,
            "inverses": {str(t): inv for t, inv in cert.template.inverses},
        }
    return {
        "schema": SCHEMA_VERSION,
        "kind": CERTIFICATE_KIND,
        "automorphism": automorphism_to_dict(cert.automorphism),
        "status": cert.status,
        "radius": cert.radius,
        "template": template,
        "witnesses": [
            {"point": list(pt), "preimage": _torsion_to_list(sigma)}
            for pt, sigma in sorted(cert.witnesses.items())
        ],
        "notes": list(cert.notes),
    }


def certificate_from_dict(data: dict) -> SurjectivityCertificate:
    from .automorphism import _torsion_from_list

    check_schema(data, kind=CERTIFICATE_KIND)
    aut = automorphism_from_dict(data["automorphism"])
    n, k = aut.params.modulus, aut.params.rank
    status = data.get("status")
    if status not in ("certified", "unknown"):
        raise ValueError(f"bad certificate status {status!r}")
    template = None
    tdata = data.get("template")
    if tdata is not None:
        template = PreimageTemplate(
            coeff=int(tdata["coeff"]),
            offset=tuple(int(x) for x in tdata["point"]),
            order=int(tdata["order"]),
            inverses=tuple(sorted((int(t), int(v)) for t, v in tdata["inverses"].items())),
        )
    witnesses = {}
    for entry in data.get("witnesses", []):
        pt = tuple(int(x) for x in entry["point"])
        witnesses[pt] = _torsion_from_list(entry["preimage"], n, k)
    return SurjectivityCertificate(
        automorphism=aut,
        certified=(status == "certified"),
        witnesses=witnesses,
        radius=int(data.get("radius", DEFAULT_BOX_RADIUS)),
        template=template,
        notes=tuple(data.get("notes", ())),
    )


def replay_certificate(cert: SurjectivityCertificate) -> list[str]:
    """Re-run every claim a certificate makes; returns failure messages."""
    failures = []
    aut = cert.automorphism
    report = aut.validate()
    if not report.ok:
        failures.extend(report.failures)
        return failures
    n, k = aut.params.modulus, aut.params.rank
    if cert.certified and not cert.witnesses:
        failures.append("certified certificate carries no witnesses")
    if cert.certified and cert.template is None:
        failures.append("certified certificate carries no orbit template")
    if cert.template is not None:
        t_ok = True
        if mat_pow(aut.matrix, cert.template.order) != identity_matrix(k):
            failures.append("template order is not an order of the lattice map")
            t_ok = False
        for t, inv in cert.template.inverses:
            if ((1 - pow(cert.template.coeff, t, n)) * inv) % n != 1:
                failures.append(f"template inverse for orbit length {t} is wrong")
                t_ok = False
        if cert.certified and t_ok:
            missing = [t for t in divisors(cert.template.order)
                       if cert.template.inverse_for(t) is None]
            if missing:
                failures.append(f"template lacks inverses for orbit lengths {missing}")
    for pt, sigma in sorted(cert.witnesses.items()):
        expected = Torsion.delta(n, k, pt)
        actual = restriction_difference(aut, sigma)
        if actual != expected:
            failures.append(
                f"witness at {pt} replays to {actual.render()}, expected {expected.render()}"
            )
    return failures
