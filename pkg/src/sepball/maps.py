"""Linear maps between matrix blocks in Choi form.

A map Phi: M_n -> M_m is stored through its Choi matrix
``C = sum_ij e_ij (x) Phi(e_ij)`` on C^n (x) C^m with the domain leg
first.  Complete positivity is positivity of C; plain positivity is
block-positivity of C, certified one way by product vectors and the
other way by a semidefinite search for a decomposition
``C = C_1 + C_2^G`` with both parts PSD (G = partial transpose on the
domain leg), which witnesses that the map is a sum of a completely
positive map and a completely positive map composed with the transpose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore, sampling
from .errors import (
    DimensionError,
    HermiticityError,
    LinearityError,
    SingularityError,
)

LINEARITY_RTOL = 1e-10
PSD_SLACK = 1e-9
DECOMP_RESIDUAL_TOL = 1e-7


@dataclass(frozen=True)
class LinearMapRep:
    """Choi-form representation of a linear map M_{dim_in} -> M_{dim_out}."""

    dim_in: int
    dim_out: int
    choi: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = matcore.as_matrix(self.choi)
        d = self.dim_in * self.dim_out
        if self.dim_in < 1 or self.dim_out < 1:
            raise DimensionError("map dimensions must be positive")
        if c.shape != (d, d):
            raise DimensionError(
                f"choi matrix has shape {c.shape}, expected ({d}, {d}) "
                f"for a map M_{self.dim_in} -> M_{self.dim_out}"
            )
        object.__setattr__(self, "choi", c)

    @property
    def choi4(self) -> np.ndarray:
        """Choi tensor reshaped to (in, out, in, out)."""
        n, m = self.dim_in, self.dim_out
        return self.choi.reshape(n, m, n, m)


def transpose_map(n: int) -> LinearMapRep:
    return LinearMapRep(n, n, matcore.swap_operator(n))


def identity_map(n: int) -> LinearMapRep:
    return LinearMapRep(n, n, matcore.max_entangled_projector(n))


def reduction_map(n: int) -> LinearMapRep:
    """x -> Tr(x) 1 - x."""
    d = n * n
    return LinearMapRep(n, n, np.eye(d) - matcore.max_entangled_projector(n))


def embedded_transpose(d: int, n: int, m: int) -> LinearMapRep:
    """x -> pad(transpose of the top d x d corner of x), M_n -> M_m.

    The compression and padding are complete contractions, so the map
    keeps the transpose's norm behavior on the corner; it is unital as a
    map of the corner M_d into itself and contractive overall.
    """
    if d > min(n, m):
        raise DimensionError(f"corner size {d} does not fit into ({n}, {m})")
    return LinearMapRep(n, m, matcore.embedded_swap(d, n, m))


def choi_of_map(apply, n: int, m: int, rtol: float = LINEARITY_RTOL) -> LinearMapRep:
    """Build the Choi representation of a callable on matrices.

    Linearity is spot-checked on one seeded random pair; a violation
    beyond ``rtol`` (relative to the outputs) raises LinearityError.
    """
    rng = sampling.rng_from(0x5EBA11, n, m)
    x = sampling.complex_gaussian(rng, (n, n))
    y = sampling.complex_gaussian(rng, (n, n))
    a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    lhs = matcore.as_matrix(apply(a * x + b * y))
    rhs = a * matcore.as_matrix(apply(x)) + b * matcore.as_matrix(apply(y))
    scale = max(1.0, matcore.frobenius_norm(lhs), matcore.frobenius_norm(rhs))
    if matcore.frobenius_norm(lhs - rhs) > rtol * scale:
        raise LinearityError(
            "callable failed the linearity spot check "
            f"(deviation {matcore.frobenius_norm(lhs - rhs):.3e})"
        )
    choi = np.zeros((n * m, n * m), dtype=np.complex128)
    c4 = choi.reshape(n, m, n, m)
    for i in range(n):
        for j in range(n):
            out = matcore.as_matrix(apply(matcore.matrix_unit(n, i, j)))
            if out.shape != (m, m):
                raise DimensionError(
                    f"apply returned shape {out.shape}, expected ({m}, {m})"
                )
            c4[i, :, j, :] = out
    return LinearMapRep(n, m, choi)


def apply_map(f: LinearMapRep, x) -> np.ndarray:
    """Evaluate the map on a matrix of its domain."""
    a = matcore.as_matrix(x)
    n = f.dim_in
    if a.shape != (n, n):
        raise DimensionError(f"input shape {a.shape} does not match M_{n}")
    return np.einsum("ij,iajb->ab", a, f.choi4)


def apply_to_second_leg(f: LinearMapRep, x, first_dim: int) -> np.ndarray:
    """(Id_k (x) f)(x) for x on C^k (x) C^{dim_in}."""
    a = matcore.as_matrix(x)
    k, n, m = int(first_dim), f.dim_in, f.dim_out
    if a.shape != (k * n, k * n):
        raise DimensionError(
            f"input shape {a.shape} does not match C^{k} (x) C^{n}"
        )
    x4 = a.reshape(k, n, k, n)
    out = np.einsum("irjs,rcsd->icjd", x4, f.choi4)
    return np.ascontiguousarray(out.reshape(k * m, k * m))


def adjoint_apply_to_second_leg(f: LinearMapRep, a, first_dim: int) -> np.ndarray:
    """Hilbert-Schmidt adjoint of (Id_k (x) f) evaluated on a."""
    m4 = matcore.as_matrix(a).reshape(first_dim, f.dim_out, first_dim, f.dim_out)
    out = np.einsum("icjd,rcsd->irjs", m4, f.choi4.conj())
    kn = first_dim * f.dim_in
    return np.ascontiguousarray(out.reshape(kn, kn))


def amplify(f: LinearMapRep, k: int) -> LinearMapRep:
    """The map Id_k (x) f as a LinearMapRep on M_{k*dim_in} -> M_{k*dim_out}.

    Its Choi matrix is, up to the explicit flip of the two middle tensor
    legs, the Kronecker product of the rank-one pairing projector P_k
    with the Choi matrix of f.
    """
    if k < 1:
        raise DimensionError(f"amplification level must be positive, got {k}")
    n, m = f.dim_in, f.dim_out
    if (k * n) * (k * m) > matcore.KRON_CAP:
        raise matcore.SizeCapError(
            f"amplified Choi would be {(k * n) * (k * m)}-dimensional, "
            f"beyond the cap {matcore.KRON_CAP}"
        )
    eye = np.eye(k)
    amp8 = np.einsum("ia,jb,rcsd->iracjsbd", eye, eye, f.choi4)
    d = k * n * k * m
    return LinearMapRep(k * n, k * m, amp8.reshape(d, d))


def is_completely_positive(f: LinearMapRep, tol: float = PSD_SLACK):
    """PSD check on the Choi matrix.

    Returns ``(flag, margin)`` where margin is the smallest eigenvalue.
    Raises HermiticityError when the Choi matrix is not Hermitian (such
    a map cannot be positive in any sense).
    """
    if tol < 0:
        raise DimensionError("tolerance must be nonnegative")
    w, _ = matcore.eig_hermitian(f.choi)
    margin = float(w[0])
    scale = max(1.0, matcore.frobenius_norm(f.choi))
    return margin >= -tol * scale, margin


def choi_domain_transpose(c: np.ndarray, n: int, m: int) -> np.ndarray:
    """Partial transpose of a Choi-shaped matrix on its domain leg."""
    return matcore.partial_transpose(c, (n, m), "first")


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 64
    steps: int = 200


@dataclass(frozen=True)
class PositivityCertificate:
    """Outcome of positivity certification for one map.

    status is one of "certified-yes", "certified-no", "undecided".
    certified-yes carries PSD parts with choi = c1 + domain-transpose(c2);
    certified-no carries the refuting product vectors and the violation.
    """

    status: str
    c1: np.ndarray | None = None
    c2: np.ndarray | None = None
    u: np.ndarray | None = None
    v: np.ndarray | None = None
    violation: float | None = None
    message: str = ""


def product_vector_refute(f: LinearMapRep, seed: int = 0,
                          budget: SearchBudget = SearchBudget()):
    """Search for product vectors making the Choi form negative.

    Alternating eigenvector descent over unit vectors u, v; the value
    <u (x) v| choi |u (x) v> is monotone nonincreasing along the sweep.
    Returns the best (value, u, v) over all restarts.
    """
    n, m = f.dim_in, f.dim_out
    c4 = f.choi4
    best = (np.inf, None, None)
    for r in range(budget.restarts):
        rng = sampling.rng_from(0xD15C0, seed, r)
        v = sampling.complex_gaussian(rng, m)
        v = v / np.linalg.norm(v)
        value = np.inf
        u = None
        for _ in range(budget.steps):
            mu = np.einsum("a,iajb,b->ij", v.conj(), c4, v)
            w, vec = matcore.eig_hermitian(mu)
            u = vec[:, 0]
            nu = np.einsum("i,iajb,j->ab", u.conj(), c4, u)
            w2, vec2 = matcore.eig_hermitian(nu)
            v = vec2[:, 0]
            new_value = float(w2[0])
            if abs(new_value - value) <= 1e-14 * max(1.0, abs(new_value)):
                value = new_value
                break
            value = new_value
        if value < best[0]:
            best = (value, u, v)
    return best


def _decomposition_problem(f: LinearMapRep):
    from . import sdp

    n, m = f.dim_in, f.dim_out
    d = n * m
    basis = sdp.hermitian_basis(d)
    constraints = []
    for h in basis:
        hg = choi_domain_transpose(h, n, m)
        rhs = float(np.real(np.trace(h @ f.choi)))
        constraints.append((rhs, [h, hg]))
    c_obj = [np.eye(d, dtype=np.complex128), np.eye(d, dtype=np.complex128)]
    return sdp.SdpProblem(blocks=(d, d), objective=c_obj, constraints=constraints)


def certify_positive_map(f: LinearMapRep, seed: int = 0,
                         budget: SearchBudget = SearchBudget(),
                         tol: float = PSD_SLACK) -> PositivityCertificate:
    """Three-way positivity certification for a Hermiticity-preserving map.

    certified-no comes from a product vector with Choi form below
    -tol * max(1, ||choi||_F); certified-yes only from a verified PSD
    decomposition found by the semidefinite solver; anything else stays
    undecided (the map may be positive but indecomposable).
    """
    from . import sdp

    choi = matcore.check_hermitian(f.choi)
    f = LinearMapRep(f.dim_in, f.dim_out, choi)
    scale = max(1.0, matcore.frobenius_norm(choi))
    threshold = -tol * scale

    cp, margin = is_completely_positive(f, tol)
    if cp:
        zero = np.zeros_like(choi)
        return PositivityCertificate(
            status="certified-yes", c1=choi, c2=zero,
            message=f"completely positive (choi margin {margin:.3e})",
        )

    value, u, v = product_vector_refute(f, seed=seed, budget=budget)
    if value < threshold:
        return PositivityCertificate(
            status="certified-no", u=u, v=v, violation=float(value),
            message="product vector makes the Choi form negative",
        )

    problem = _decomposition_problem(f)
    sol = sdp.solve(problem)
    if sol.status == "optimal":
        c1, c2 = sol.primal[0], sol.primal[1]
        resid = matcore.frobenius_norm(
            c1 + choi_domain_transpose(c2, f.dim_in, f.dim_out) - choi
        )
        m1 = matcore.min_eigenvalue(c1)
        m2 = matcore.min_eigenvalue(c2)
        if resid <= DECOMP_RESIDUAL_TOL * scale and min(m1, m2) >= threshold:
            return PositivityCertificate(
                status="certified-yes", c1=c1, c2=c2,
                message=f"decomposition found (residual {resid:.3e})",
            )
        return PositivityCertificate(
            status="undecided",
            message=f"solver returned a split that failed verification "
                    f"(residual {resid:.3e}, margins {m1:.3e}/{m2:.3e})",
        )
    return PositivityCertificate(
        status="undecided",
        message=f"no decomposition found (solver status {sol.status}); "
                "the map may be positive but indecomposable",
    )


def unitalize(f: LinearMapRep, eps: float = 0.0) -> LinearMapRep:
    """Normalize a positive map to a unital one.

    Adds ``eps * (Tr(x)/n) * 1`` to the output (a state times the unit)
    and conjugates by the inverse square root of the regularized unit
    image.  With eps = 0 the unit image must be invertible; otherwise a
    SingularityError suggests passing a positive eps.
    """
    if eps < 0:
        raise DimensionError(f"eps must be nonnegative, got {eps}")
    n, m = f.dim_in, f.dim_out
    choi = matcore.check_hermitian(f.choi)
    unit_image = matcore.partial_trace(choi, (n, m), "first")
    s = unit_image + eps * np.eye(m)
    w, vecs = matcore.eig_hermitian(s)
    if w[0] <= 1e-10 * max(1.0, float(w[-1])):
        raise SingularityError(
            "the image of the unit is numerically singular "
            f"(smallest eigenvalue {w[0]:.3e}); pass a positive eps to regularize"
        )
    inv_sqrt = (vecs * (w ** -0.5)) @ vecs.conj().T
    shifted = choi + (eps / n) * np.eye(n * m)
    conj = matcore.kron(np.eye(n), inv_sqrt)
    return LinearMapRep(n, m, conj @ shifted @ conj.conj().T)


def unitality_residual(f: LinearMapRep) -> float:
    """Operator-norm distance of the unit's image from the identity."""
    unit_image = matcore.partial_trace(f.choi, (f.dim_in, f.dim_out), "first")
    return matcore.operator_norm(unit_image - np.eye(f.dim_out))


def hat_functional(f: LinearMapRep, x) -> complex:
    """The functional x -> Tr(sum_i a_i^T f(b_i)) for x = sum_i a_i (x) b_i.

    Here f maps M_m -> M_n and x lives on C^n (x) C^m, with f acting on
    the second leg; the pairing traces against the transposed first leg.
    """
    m, n = f.dim_in, f.dim_out
    a = matcore.as_matrix(x)
    if a.shape != (n * m, n * m):
        raise DimensionError(
            f"element shape {a.shape} does not match C^{n} (x) C^{m} "
            f"for a map M_{m} -> M_{n}"
        )
    x4 = a.reshape(n, m, n, m)
    return complex(np.einsum("iajb,aibj->", x4, f.choi4))


@dataclass(frozen=True)
class MapClassification:
    completely_positive: bool
    cp_margin: float
    positivity: PositivityCertificate
    unital: bool
    unital_residual: float


def classify_map(f: LinearMapRep, seed: int = 0,
                 budget: SearchBudget = SearchBudget(),
                 tol: float = PSD_SLACK) -> MapClassification:
    """Joint CP / positivity / unitality classification."""
    try:
        cp, margin = is_completely_positive(f, tol)
    except HermiticityError:
        cp, margin = False, float("-inf")
    if cp:
        positivity = PositivityCertificate(
            status="certified-yes", c1=matcore.check_hermitian(f.choi),
            c2=np.zeros_like(f.choi), message="completely positive",
        )
    else:
        positivity = certify_positive_map(f, seed=seed, budget=budget, tol=tol)
    residual = unitality_residual(f)
    return MapClassification(
        completely_positive=cp,
        cp_margin=margin,
        positivity=positivity,
        unital=residual <= 1e-10 * max(1.0, matcore.frobenius_norm(f.choi)),
        unital_residual=residual,
    )
