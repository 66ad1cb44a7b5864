"""Vector-field and symplectic algebra on exact expressions: directional
derivatives, Lie brackets, Jacobians, cotangent lifts of fields and map
germs, fiber-wise linear Hamiltonians, Hamiltonian fields and Poisson
brackets.

Sign conventions: the Hamiltonian field of H has z-components dH/dp and
p-components -dH/dz, which makes the cotangent lift of a field equal the
Hamiltonian field of its fiber Hamiltonian exactly.  With the Poisson
bracket {F,G} = sum_i (dF/dz_i dG/dp_i - dF/dp_i dG/dz_i) the fiber map
is an antihomomorphism: {h_X, h_Y} = -h_[X,Y].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import expr as ex
from .expr import (
    Expression, VariableContext, Verdict, differentiate, free_variables,
    is_zero, normalize,
)

__all__ = [
    "VectorField", "ScalarField", "CotangentContext", "MapGerm",
    "ContextMismatchError", "SingularJacobianError", "apply_field",
    "lie_bracket", "jacobian", "fiber_hamiltonian", "cotangent_lift_field",
    "hamiltonian_vector_field", "poisson_bracket", "cotangent_lift_map",
    "pullback",
]

BRACKET_HOMOMORPHISM_SIGN = -1


class ContextMismatchError(ValueError):
    pass


class SingularJacobianError(ValueError):
    pass


def _check_uses_context(what: str, e: Expression, ctx: VariableContext):
    extra = free_variables(e) - set(ctx.names)
    if extra:
        raise ValueError(f"{what} uses variables outside its context: {sorted(extra)}")


@dataclass(frozen=True)
class VectorField:
    """Components a_i paired with the i-th context variable."""

    ctx: VariableContext
    components: tuple[Expression, ...]

    def __init__(self, ctx: VariableContext, components):
        components = tuple(components)
        if len(components) != ctx.dimension:
            raise ValueError(
                f"expected {ctx.dimension} components, got {len(components)}")
        for c in components:
            _check_uses_context("vector field component", c, ctx)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "components", components)

    def normalized(self) -> "VectorField":
        return VectorField(self.ctx, tuple(normalize(c) for c in self.components))


@dataclass(frozen=True)
class ScalarField:
    ctx: VariableContext
    value: Expression

    def __init__(self, ctx: VariableContext, value: Expression):
        _check_uses_context("scalar field", value, ctx)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "value", value)

    def normalized(self) -> "ScalarField":
        return ScalarField(self.ctx, normalize(self.value))


@dataclass(frozen=True)
class CotangentContext:
    """Base coordinates followed by their dual fiber coordinates."""

    base: VariableContext
    dual_names: tuple[str, ...]

    @staticmethod
    def from_base(base: VariableContext) -> "CotangentContext":
        duals = tuple(f"p{i + 1}" for i in range(base.dimension))
        clash = set(duals) & set(base.names)
        if clash:
            raise ValueError(
                f"base variables collide with dual names {sorted(clash)}; rename them")
        return CotangentContext(base, duals)

    @property
    def extended(self) -> VariableContext:
        return VariableContext(self.base.names + self.dual_names)

    @property
    def dimension(self) -> int:
        return self.base.dimension


@dataclass(frozen=True)
class MapGerm:
    """Local diffeomorphism candidate Phi: components per base variable.
    Construction rejects identically singular Jacobians."""

    ctx: VariableContext
    components: tuple[Expression, ...]

    def __init__(self, ctx: VariableContext, components):
        components = tuple(components)
        if len(components) != ctx.dimension:
            raise ValueError(
                f"expected {ctx.dimension} components, got {len(components)}")
        for c in components:
            _check_uses_context("map germ component", c, ctx)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "components", components)
        det = _det([[differentiate(components[j], v) for v in ctx.names]
                    for j in range(ctx.dimension)])
        if is_zero(det) is not Verdict.NONZERO:
            raise SingularJacobianError("Jacobian determinant is identically zero")


def _require_shared(ctx_a: VariableContext, ctx_b: VariableContext):
    if ctx_a != ctx_b:
        raise ContextMismatchError(
            f"contexts differ: {ctx_a.names} vs {ctx_b.names}")


def apply_field(X: VectorField, f: ScalarField) -> ScalarField:
    """Directional derivative X(f) = sum_i a_i df/dz_i."""
    _require_shared(X.ctx, f.ctx)
    acc: Expression = ex.ZERO
    for a_i, name in zip(X.components, X.ctx.names):
        acc = acc + a_i * differentiate(f.value, name)
    return ScalarField(X.ctx, normalize(acc))


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y] with components X(Y_i) - Y(X_i)."""
    _require_shared(X.ctx, Y.ctx)
    out = []
    for x_i, y_i in zip(X.components, Y.components):
        term = ex.ZERO
        for a_j, b_j, name in zip(X.components, Y.components, X.ctx.names):
            term = term + a_j * differentiate(y_i, name) - b_j * differentiate(x_i, name)
        out.append(normalize(term))
    return VectorField(X.ctx, tuple(out))


def jacobian(X: VectorField) -> tuple[tuple[Expression, ...], ...]:
    """Matrix with entry (i, j) = da_i/dz_j."""
    return tuple(
        tuple(differentiate(a_i, v) for v in X.ctx.names)
        for a_i in X.components
    )


def pullback(cc: CotangentContext, f: ScalarField) -> ScalarField:
    """Base function read on the cotangent bundle (composition with the
    bundle projection)."""
    _require_shared(cc.base, f.ctx)
    return ScalarField(cc.extended, f.value)


def fiber_hamiltonian(X: VectorField, cc: CotangentContext) -> ScalarField:
    """h_X = sum_i a_i(z) p_i, the fiber-wise linear pairing with X."""
    _require_shared(cc.base, X.ctx)
    acc: Expression = ex.ZERO
    for a_i, p_name in zip(X.components, cc.dual_names):
        acc = acc + a_i * ex.Var(p_name)
    return ScalarField(cc.extended, normalize(acc))


def cotangent_lift_field(X: VectorField, cc: CotangentContext) -> VectorField:
    """Lift to the cotangent bundle: z-components a_i, p_i-component
    -sum_j (da_j/dz_i) p_j."""
    _require_shared(cc.base, X.ctx)
    z_parts = [normalize(a) for a in X.components]
    p_parts = []
    for z_name in cc.base.names:
        acc: Expression = ex.ZERO
        for a_j, p_name in zip(X.components, cc.dual_names):
            acc = acc + differentiate(a_j, z_name) * ex.Var(p_name)
        p_parts.append(normalize(ex.Neg(acc)))
    return VectorField(cc.extended, tuple(z_parts + p_parts))


def hamiltonian_vector_field(H: ScalarField, cc: CotangentContext) -> VectorField:
    """X_H with z_i-component dH/dp_i and p_i-component -dH/dz_i."""
    _require_shared(cc.extended, H.ctx)
    z_parts = [differentiate(H.value, p) for p in cc.dual_names]
    p_parts = [normalize(ex.Neg(differentiate(H.value, z))) for z in cc.base.names]
    return VectorField(cc.extended, tuple(z_parts + p_parts))


def poisson_bracket(F: ScalarField, G: ScalarField, cc: CotangentContext) -> ScalarField:
    """{F, G} = sum_i (dF/dz_i dG/dp_i - dF/dp_i dG/dz_i)."""
    _require_shared(cc.extended, F.ctx)
    _require_shared(cc.extended, G.ctx)
    acc: Expression = ex.ZERO
    for z_name, p_name in zip(cc.base.names, cc.dual_names):
        acc = acc + (differentiate(F.value, z_name) * differentiate(G.value, p_name)
                     - differentiate(F.value, p_name) * differentiate(G.value, z_name))
    return ScalarField(cc.extended, normalize(acc))


def _minor(matrix, row, col):
    return [
        [entry for j, entry in enumerate(r) if j != col]
        for i, r in enumerate(matrix) if i != row
    ]


def _det(matrix) -> Expression:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    acc: Expression = ex.ZERO
    for j in range(n):
        term = matrix[0][j] * _det(_minor(matrix, 0, j))
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _adjugate(matrix):
    n = len(matrix)
    if n == 1:
        return [[ex.ONE]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            cof = _det(_minor(matrix, j, i))
            adj[i][j] = cof if (i + j) % 2 == 0 else ex.Neg(cof)
    return adj


def cotangent_lift_map(phi: MapGerm, cc: CotangentContext) -> tuple[Expression, ...]:
    """Lift of a local diffeomorphism: base components followed by the
    fiber components (inverse-transpose Jacobian applied to p), computed
    exactly by adjugate over determinant."""
    _require_shared(cc.base, phi.ctx)
    m = phi.ctx.dimension
    # entry (i, j) = dPhi_j / dz_i, i.e. the transposed Jacobian
    jt = [[differentiate(phi.components[j], v) for j in range(m)]
          for v in phi.ctx.names]
    det = normalize(_det(jt))
    if is_zero(det) is not Verdict.NONZERO:
        raise SingularJacobianError("Jacobian determinant is identically zero")
    adj = _adjugate(jt)
    fiber = []
    for i in range(m):
        acc: Expression = ex.ZERO
        for j, p_name in enumerate(cc.dual_names):
            acc = acc + adj[i][j] * ex.Var(p_name)
        fiber.append(normalize(ex.Div(acc, det)))
    base = [normalize(c) for c in phi.components]
    return tuple(base + fiber)
