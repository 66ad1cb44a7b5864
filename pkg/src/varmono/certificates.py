"""Integrability certificates and their verification.

A certificate packs the system with k commuting fields and l common first
integrals, k + l = dimension.  Verification certifies the commutation and
first-integral identities symbolically and checks generic independence
numerically at seeded sample points (full rank at any sample certifies
independence almost everywhere, rank being lower-semicontinuous).
Lifting produces the half-dimension family of Hamiltonians on the
cotangent bundle whose pairwise involutivity is checked the same way.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .expr import Verdict, differentiate, evaluate, is_zero, normalize
from .fields import (
    CotangentContext, ScalarField, VectorField, apply_field,
    cotangent_lift_field, fiber_hamiltonian, hamiltonian_vector_field,
    poisson_bracket, pullback,
)

__all__ = [
    "IntegrabilityCertificate", "LiouvilleCertificate", "IdentityCheck",
    "IndependenceCheck", "CertificateReport", "verify_certificate",
    "lift_certificate", "verify_liouville",
]

_RANK_TOL = 1e-8
_MAX_POINT_ATTEMPTS = 50


@dataclass(frozen=True)
class IntegrabilityCertificate:
    """System X, commuting fields X_1..X_k (X_1 = X) and common first
    integrals f_1..f_l with k + l = dimension."""

    system: VectorField
    commuting_fields: tuple[VectorField, ...]
    first_integrals: tuple[ScalarField, ...] = ()

    def __init__(self, system, commuting_fields, first_integrals=()):
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "commuting_fields", tuple(commuting_fields))
        object.__setattr__(self, "first_integrals", tuple(first_integrals))

    @property
    def k(self) -> int:
        return len(self.commuting_fields)

    @property
    def l(self) -> int:
        return len(self.first_integrals)

    def structural_problems(self) -> list[str]:
        problems = []
        m = self.system.ctx.dimension
        if self.k < 1:
            problems.append("need at least one commuting field (the system itself)")
        if self.k + self.l != m:
            problems.append(
                f"field/integral counts k={self.k}, l={self.l} do not satisfy k+l={m}")
        for i, f in enumerate(self.commuting_fields):
            if f.ctx != self.system.ctx:
                problems.append(f"commuting field {i + 1} uses a different context")
        for j, f in enumerate(self.first_integrals):
            if f.ctx != self.system.ctx:
                problems.append(f"first integral {j + 1} uses a different context")
        if self.commuting_fields and self.commuting_fields[0].ctx == self.system.ctx:
            x1 = self.commuting_fields[0].normalized()
            x = self.system.normalized()
            if x1 != x:
                problems.append("the first commuting field must equal the system")
        return problems


@dataclass(frozen=True)
class LiouvilleCertificate:
    """Half-dimension family H_1..H_m on the cotangent bundle; H_1 is the
    fiber Hamiltonian of the lifted system."""

    cc: CotangentContext
    hamiltonians: tuple[ScalarField, ...]
    base_field: VectorField | None = None

    def __init__(self, cc, hamiltonians, base_field=None):
        object.__setattr__(self, "cc", cc)
        object.__setattr__(self, "hamiltonians", tuple(hamiltonians))
        object.__setattr__(self, "base_field", base_field)


@dataclass(frozen=True)
class IdentityCheck:
    label: str
    verdict: Verdict


@dataclass(frozen=True)
class IndependenceCheck:
    label: str
    required_rank: int
    sample_ranks: tuple[int, ...]
    ok: bool


@dataclass(frozen=True)
class CertificateReport:
    kind: str
    structural_ok: bool
    structural_problems: tuple[str, ...]
    identities: tuple[IdentityCheck, ...]
    independence: tuple[IndependenceCheck, ...]
    overall: str

    @property
    def passed(self) -> bool:
        return self.overall == "pass"


def _overall(structural_ok: bool, identities, independence) -> str:
    if not structural_ok:
        return "fail"
    if any(c.verdict is Verdict.NONZERO for c in identities):
        return "fail"
    if any(not c.ok for c in independence):
        return "fail"
    return "pass"


def _sample_point(rng: random.Random, names) -> dict[str, complex]:
    return {
        n: complex(rng.randint(-2000, 2000) / 1000, rng.randint(-2000, 2000) / 1000)
        for n in names
    }


def _numeric_rank(matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > _RANK_TOL * s[0]))


def _sampled_ranks(rows_of_exprs, names, samples: int, rng: random.Random):
    """Evaluate a matrix of expressions at random points, resampling past
    poles; returns the numeric rank at each sample (0 when no pole-free
    point was found)."""
    ranks = []
    for _ in range(samples):
        rank = 0
        for _attempt in range(_MAX_POINT_ATTEMPTS):
            point = _sample_point(rng, names)
            try:
                values = np.array(
                    [[evaluate(e, point) for e in row] for row in rows_of_exprs],
                    dtype=complex)
            except (ex.PoleError, ex.DomainError):
                continue
            rank = _numeric_rank(values)
            break
        ranks.append(rank)
    return tuple(ranks)


def verify_certificate(cert: IntegrabilityCertificate, samples: int = 5,
                       seed: int = 0) -> CertificateReport:
    """Check all bracket and first-integral identities plus generic
    independence of the fields and of the integral gradients."""
    problems = cert.structural_problems()
    structural_ok = not problems
    ctx = cert.system.ctx
    rng = random.Random(seed)

    identities: list[IdentityCheck] = []
    contexts_fine = all(f.ctx == ctx for f in cert.commuting_fields) and \
        all(f.ctx == ctx for f in cert.first_integrals)
    if contexts_fine:
        from .fields import lie_bracket
        fields_ = cert.commuting_fields
        for i in range(len(fields_)):
            for j in range(i + 1, len(fields_)):
                bracket = lie_bracket(fields_[i], fields_[j])
                verdict = ex.worst_verdict(
                    *[is_zero(c) for c in bracket.components]) if bracket.components \
                    else Verdict.EXACT_ZERO
                identities.append(IdentityCheck(f"bracket[{i + 1},{j + 1}]", verdict))
        for i, X_i in enumerate(fields_):
            for j, f_j in enumerate(cert.first_integrals):
                verdict = is_zero(apply_field(X_i, f_j).value)
                identities.append(
                    IdentityCheck(f"first_integral[{i + 1},{j + 1}]", verdict))

    independence: list[IndependenceCheck] = []
    if contexts_fine and cert.commuting_fields:
        # columns are the field values at the sample point
        rows = [
            [f.components[r] for f in cert.commuting_fields]
            for r in range(ctx.dimension)
        ]
        ranks = _sampled_ranks(rows, ctx.names, samples, rng)
        k = len(cert.commuting_fields)
        independence.append(IndependenceCheck(
            "field_values", k, ranks, max(ranks, default=0) == k))
    if contexts_fine and cert.first_integrals:
        rows = [
            [differentiate(f.value, v) for v in ctx.names]
            for f in cert.first_integrals
        ]
        ranks = _sampled_ranks(rows, ctx.names, samples, rng)
        l = len(cert.first_integrals)
        independence.append(IndependenceCheck(
            "integral_gradients", l, ranks, max(ranks, default=0) == l))

    return CertificateReport(
        kind="certificate",
        structural_ok=structural_ok,
        structural_problems=tuple(problems),
        identities=tuple(identities),
        independence=tuple(independence),
        overall=_overall(structural_ok, identities, independence),
    )


def lift_certificate(cert: IntegrabilityCertificate) -> LiouvilleCertificate:
    """H_i = h_{X_i} for the commuting fields, then the first integrals
    pulled back through the bundle projection.  Total: hypotheses are
    enforced by the verification pipeline, not here."""
    cc = CotangentContext.from_base(cert.system.ctx)
    hams = [fiber_hamiltonian(X_i, cc) for X_i in cert.commuting_fields]
    hams += [pullback(cc, f_j) for f_j in cert.first_integrals]
    base = cert.commuting_fields[0] if cert.commuting_fields else cert.system
    return LiouvilleCertificate(cc, tuple(hams), base_field=base)


def _recovered_base_field(lc: LiouvilleCertificate) -> VectorField | None:
    """Base field read off H_1 = sum a_i p_i; None when H_1 is not
    fiber-wise linear over the base."""
    if not lc.hamiltonians:
        return None
    h1 = lc.hamiltonians[0]
    comps = []
    base_names = set(lc.cc.base.names)
    for p_name in lc.cc.dual_names:
        a = differentiate(h1.value, p_name)
        if not (ex.free_variables(a) <= base_names):
            return None
        comps.append(a)
    candidate = VectorField(lc.cc.base, tuple(comps))
    if fiber_hamiltonian(candidate, lc.cc).normalized() != h1.normalized():
        return None
    return candidate


def verify_liouville(lc: LiouvilleCertificate, samples: int = 5,
                     seed: int = 0) -> CertificateReport:
    """Check pairwise involution of the Hamiltonians, independence of
    their gradients, and that the Hamiltonian field of H_1 is exactly the
    cotangent lift of the base field."""
    cc = lc.cc
    m = cc.dimension
    rng = random.Random(seed)
    problems = []
    if len(lc.hamiltonians) != m:
        problems.append(
            f"expected {m} Hamiltonians, got {len(lc.hamiltonians)}")
    for i, h in enumerate(lc.hamiltonians):
        if h.ctx != cc.extended:
            problems.append(f"Hamiltonian {i + 1} is not over the extended context")
    structural_ok = not problems

    identities: list[IdentityCheck] = []
    hams = [h for h in lc.hamiltonians if h.ctx == cc.extended]
    for i in range(len(hams)):
        for j in range(i + 1, len(hams)):
            verdict = is_zero(poisson_bracket(hams[i], hams[j], cc).value)
            identities.append(IdentityCheck(f"poisson[{i + 1},{j + 1}]", verdict))

    base = lc.base_field or _recovered_base_field(lc)
    if hams and base is not None and base.ctx == cc.base:
        expected = cotangent_lift_field(base, cc).normalized()
        actual = hamiltonian_vector_field(hams[0], cc).normalized()
        verdict = ex.worst_verdict(
            *[is_zero(a - b) for a, b in zip(actual.components, expected.components)])
        identities.append(IdentityCheck("hamiltonian_field_matches_lift", verdict))
    elif hams:
        identities.append(
            IdentityCheck("hamiltonian_field_matches_lift", Verdict.NONZERO))

    independence: list[IndependenceCheck] = []
    if hams:
        rows = [
            [differentiate(h.value, v) for v in cc.extended.names]
            for h in hams
        ]
        ranks = _sampled_ranks(rows, cc.extended.names, samples, rng)
        independence.append(IndependenceCheck(
            "hamiltonian_gradients", len(hams), ranks,
            max(ranks, default=0) == len(hams) and len(hams) == m))

    return CertificateReport(
        kind="liouville",
        structural_ok=structural_ok,
        structural_problems=tuple(problems),
        identities=tuple(identities),
        independence=tuple(independence),
        overall=_overall(structural_ok, identities, independence),
    )
