"""Dense primal-dual interior-point solver for Hermitian semidefinite programs.

Standard form over block-diagonal Hermitian cones:

    minimize    <C, X>
    subject to  <A_i, X> = b_i   (i = 1..p)
                X >= 0 blockwise

with ``<A, B> = Tr(A B)`` real for Hermitian arguments.  Complex Hermitian
blocks are handled natively: the Nesterov-Todd scaling, the Schur
complement and all eigencomputations run in complex arithmetic, never
through a doubled real embedding.

The search direction is the Nesterov-Todd one with a Mehrotra
predictor-corrector; the step fraction to the cone boundary and the
identity infeasible start are fixed constants, so repeated solves of the
same problem are bitwise identical.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from . import matcore
from .errors import DimensionError

# Fixed algorithm constants (read-only; not part of SdpOptions).
STEP_FRACTION = 0.98
DIVERGENCE_SCALE = 1e8
LOOSE_MERIT = 1e-7  # accept early-terminated iterates up to this KKT merit


@dataclass(frozen=True)
class SdpOptions:
    max_iter: int = 200
    feas_tol: float = 1e-9
    gap_tol: float = 1e-9
    check_independence: bool = True


@dataclass(frozen=True)
class SdpProblem:
    """Standard-form problem data; all coefficient matrices Hermitian."""

    blocks: tuple[int, ...]
    objective: tuple[np.ndarray, ...]
    constraints: tuple[tuple[float, tuple[np.ndarray, ...]], ...]

    def __init__(self, blocks, objective, constraints):
        blocks = tuple(int(d) for d in blocks)
        if len(blocks) == 0 or any(d < 1 for d in blocks):
            raise DimensionError(f"invalid block sizes {blocks}")
        if len(objective) != len(blocks):
            raise DimensionError("objective needs one matrix per block")
        obj = tuple(
            matcore.check_hermitian(_sized(c, d)) for c, d in zip(objective, blocks)
        )
        cons = []
        for idx, (rhs, mats) in enumerate(constraints):
            rhs = float(rhs)
            if not np.isfinite(rhs):
                raise DimensionError(f"constraint {idx} has non-finite rhs")
            if len(mats) != len(blocks):
                raise DimensionError(
                    f"constraint {idx} needs one matrix per block"
                )
            cons.append((
                rhs,
                tuple(
                    matcore.check_hermitian(_sized(a, d))
                    for a, d in zip(mats, blocks)
                ),
            ))
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)


def _sized(m, d: int) -> np.ndarray:
    a = matcore.as_matrix(m)
    if a.shape != (d, d):
        raise DimensionError(f"matrix of shape {a.shape} does not fit block {d}")
    return a


@dataclass(frozen=True)
class SdpSolution:
    status: str  # optimal | infeasible | unbounded | maxiter
    primal: tuple[np.ndarray, ...] = field(repr=False, default=())
    dual_y: np.ndarray = field(repr=False, default=None)
    dual_slack: tuple[np.ndarray, ...] = field(repr=False, default=())
    primal_obj: float = float("nan")
    dual_obj: float = float("nan")
    duality_gap: float = float("nan")
    rel_gap: float = float("nan")
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")
    iterations: int = 0
    message: str = ""
    ray: object = field(repr=False, default=None)


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of the d x d Hermitian matrices."""
    basis = []
    for k in range(d):
        basis.append(matcore.matrix_unit(d, k, k))
    s = 1.0 / np.sqrt(2.0)
    for k in range(d):
        for l in range(k + 1, d):
            e_kl = matcore.matrix_unit(d, k, l)
            e_lk = matcore.matrix_unit(d, l, k)
            basis.append((e_kl + e_lk) * s)
            basis.append(1j * (e_kl - e_lk) * s)
    return basis


class _Compiled:
    """Vectorized constraint data: dense stacks plus sparse row matrices."""

    def __init__(self, problem: SdpProblem, check_independence: bool):
        self.blocks = problem.blocks
        self.C = [c.copy() for c in problem.objective]
        self.inconsistent = None

        p = problem.num_constraints
        b = np.array([rhs for rhs, _ in problem.constraints], dtype=float)
        stacks = []
        for bi, d in enumerate(problem.blocks):
            stack = np.zeros((p, d, d), dtype=np.complex128)
            for i, (_, mats) in enumerate(problem.constraints):
                stack[i] = mats[bi]
            stacks.append(stack)

        keep = np.arange(p)
        if check_independence and p > 1:
            keep, dropped, inconsistent = _independent_rows(stacks, b)
            if dropped:
                warnings.warn(
                    f"dropped {len(dropped)} linearly dependent constraint rows: "
                    f"{sorted(dropped)}",
                    stacklevel=3,
                )
            if inconsistent is not None:
                self.inconsistent = (
                    f"constraint {inconsistent} is a linear combination of the "
                    "others but its right-hand side disagrees"
                )

        self.keep = keep
        self.b = b[keep]
        self.p = len(keep)
        self.stacks = [s[keep] for s in stacks]
        self.csr = [
            scipy.sparse.csr_matrix(s.reshape(self.p, d * d))
            for s, d in zip(self.stacks, problem.blocks)
        ]
        self.csr_conj = [a.conj().tocsr() for a in self.csr]
        self.norm_b = float(np.linalg.norm(self.b))
        self.norm_c = float(np.sqrt(sum(np.linalg.norm(c) ** 2 for c in self.C)))

    def apply(self, xs) -> np.ndarray:
        """A(X): the vector of constraint values."""
        out = np.zeros(self.p)
        for a, x in zip(self.csr_conj, xs):
            out += np.real(a @ x.reshape(-1))
        return out

    def adjoint(self, y):
        """A*(y): one Hermitian matrix per block."""
        out = []
        for a, d in zip(self.csr, self.blocks):
            m = (a.T @ y).reshape(d, d)
            out.append(m)
        return out

    def schur(self, ws) -> np.ndarray:
        """M_ij = sum_blocks Tr(A_i W A_j W) for the NT scaling W."""
        m = np.zeros((self.p, self.p), dtype=np.complex128)
        for a_conj, stack, w in zip(self.csr_conj, self.stacks, ws):
            if stack.shape[1] == 0:
                continue
            waw = np.matmul(np.matmul(w, stack), w)
            m += a_conj @ waw.reshape(self.p, -1).T
        m = m.real
        return (m + m.T) / 2.0


def _independent_rows(stacks, b):
    """Select a maximal independent subset of constraint rows via pivoted QR."""
    p = len(b)
    cols = []
    for s in stacks:
        flat = s.reshape(p, -1)
        cols.append(flat.real)
        cols.append(flat.imag)
    v = np.hstack(cols)  # (p, total real dof)
    r = scipy.linalg.qr(v.T, mode="r", pivoting=True)
    rmat, piv = r[0], r[1]
    diag = np.abs(np.diagonal(rmat))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(diag > 1e-12 * diag[0] * max(v.shape)))
    keep = np.sort(piv[:rank])
    dropped = sorted(set(range(p)) - set(keep.tolist()))
    inconsistent = None
    if dropped:
        vk = v[keep]
        for i in dropped:
            coef, *_ = np.linalg.lstsq(vk.T, v[i], rcond=None)
            if abs(float(coef @ b[keep]) - b[i]) > 1e-9 * max(1.0, abs(b[i])):
                inconsistent = i
                break
    return keep, dropped, inconsistent


def _eigh(m):
    h = (m + m.conj().T) / 2.0
    return np.linalg.eigh(h)


def _nt_scaling(x, z):
    """Return (W, G, G_inv, lam, lam_w, lam_q) with W Z W = X, G = W^{1/2}."""
    wx, vx = _eigh(x)
    wx = np.maximum(wx, 1e-300)
    sqrt_x = (vx * np.sqrt(wx)) @ vx.conj().T
    t = sqrt_x @ z @ sqrt_x
    wt, vt = _eigh(t)
    wt = np.maximum(wt, 1e-300)
    inv_sqrt_t = (vt * (wt ** -0.5)) @ vt.conj().T
    w = sqrt_x @ inv_sqrt_t @ sqrt_x
    w = (w + w.conj().T) / 2.0
    ww, vw = _eigh(w)
    ww = np.maximum(ww, 1e-300)
    g = (vw * np.sqrt(ww)) @ vw.conj().T
    g_inv = (vw * (ww ** -0.5)) @ vw.conj().T
    lam = g @ z @ g
    lam = (lam + lam.conj().T) / 2.0
    lw, lq = _eigh(lam)
    return w, g, g_inv, lam, lw, lq


def _step_to_boundary(s, ds):
    """Largest alpha with s + alpha*ds >= 0 (inf when ds points inward)."""
    try:
        l = scipy.linalg.cholesky(s, lower=True)
        y1 = scipy.linalg.solve_triangular(l, ds, lower=True)
        y2 = scipy.linalg.solve_triangular(l, y1.conj().T, lower=True)
        k = y2.conj().T
    except scipy.linalg.LinAlgError:
        w, v = _eigh(s)
        w = np.maximum(w, 1e-300)
        inv_sqrt = (v * (w ** -0.5)) @ v.conj().T
        k = inv_sqrt @ ds @ inv_sqrt
    lam_min = float(np.linalg.eigvalsh((k + k.conj().T) / 2.0)[0])
    if lam_min >= -1e-300:
        return np.inf
    return -1.0 / lam_min


def _lyapunov_solve(rhs, lw, lq):
    """Solve (lam U + U lam)/2 = rhs in the eigenbasis (lw, lq) of lam."""
    r = lq.conj().T @ rhs @ lq
    denom = (lw[:, None] + lw[None, :]) / 2.0
    return lq @ (r / denom) @ lq.conj().T


def solve(problem: SdpProblem, options: SdpOptions | None = None) -> SdpSolution:
    """Run the interior-point iteration; see the module docstring."""
    opts = options or SdpOptions()
    comp = _Compiled(problem, opts.check_independence)
    if comp.inconsistent is not None:
        return SdpSolution(status="infeasible", message=comp.inconsistent)

    blocks = comp.blocks
    n_total = sum(blocks)
    xs = [np.eye(d, dtype=np.complex128) for d in blocks]
    zs = [np.eye(d, dtype=np.complex128) for d in blocks]
    y = np.zeros(comp.p)

    def inner(us, vs):
        return float(sum(np.real(np.vdot(u, v)) for u, v in zip(us, vs)))

    best = None
    best_merit = np.inf
    message = ""
    status = "maxiter"
    it = 0
    stall = 0

    for it in range(1, opts.max_iter + 1):
        rp = comp.b - comp.apply(xs)
        aty = comp.adjoint(y)
        rd = [c - z - a for c, z, a in zip(comp.C, zs, aty)]
        pobj = inner(comp.C, xs)
        dobj = float(comp.b @ y)
        gap = inner(xs, zs)
        mu = gap / n_total
        scale = 1.0 + abs(pobj) + abs(dobj)
        pres = float(np.linalg.norm(rp)) / (1.0 + comp.norm_b)
        dres = float(np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd))) / (
            1.0 + comp.norm_c
        )
        rel_gap = abs(pobj - dobj) / scale
        cgap = gap / scale
        merit = max(pres, dres, rel_gap, cgap)

        if merit < best_merit:
            best_merit = merit
            best = (
                tuple(x.copy() for x in xs), y.copy(),
                tuple(z.copy() for z in zs),
                pobj, dobj, gap, rel_gap, pres, dres, it,
            )
            stall = 0
        else:
            stall += 1

        if (pres <= opts.feas_tol and dres <= opts.feas_tol
                and rel_gap <= opts.gap_tol and cgap <= opts.gap_tol):
            status = "optimal"
            break
        if stall >= 8 and best_merit <= LOOSE_MERIT:
            status = "optimal"
            message = "accepted after progress stalled below the loose tolerance"
            break

        diverging = max(abs(pobj), abs(dobj)) > DIVERGENCE_SCALE * max(
            1.0, comp.norm_b, comp.norm_c
        )
        if diverging:
            cert = _infeasibility_certificate(comp, y)
            if cert is not None:
                return SdpSolution(
                    status="infeasible", dual_y=y.copy(), iterations=it,
                    message="dual improving ray found; primal is infeasible",
                    ray=cert,
                )
            cert = _unboundedness_certificate(comp, xs, pobj)
            if cert is not None:
                return SdpSolution(
                    status="unbounded", iterations=it,
                    message="primal improving ray found; objective is unbounded",
                    ray=cert,
                )

        scal = [_nt_scaling(x, z) for x, z in zip(xs, zs)]
        ws = [s[0] for s in scal]
        m = comp.schur(ws)
        factor = _factor_with_retry(m)
        if factor is None:
            message = ("Schur complement stayed indefinite after regularization "
                       "retries; returning the best iterate")
            break

        w_rd_w = [w @ r @ w for w, r in zip(ws, rd)]

        # Predictor (affine scaling) direction.
        rc = [-x for x in xs]
        dy = _solve_factored(factor, rp - comp.apply(rc) + comp.apply(w_rd_w), comp)
        dz = [r - a for r, a in zip(rd, comp.adjoint(dy))]
        dx = [c - w @ z_ @ w for c, w, z_ in zip(rc, ws, dz)]
        dx = [(d + d.conj().T) / 2.0 for d in dx]
        dz = [(d + d.conj().T) / 2.0 for d in dz]

        ap = min(1.0, STEP_FRACTION * min(
            _step_to_boundary(x, d) for x, d in zip(xs, dx)))
        ad = min(1.0, STEP_FRACTION * min(
            _step_to_boundary(z, d) for z, d in zip(zs, dz)))
        gap_aff = inner(
            [x + ap * d for x, d in zip(xs, dx)],
            [z + ad * d for z, d in zip(zs, dz)],
        )
        sigma = min(1.0, max((max(gap_aff, 0.0) / gap) ** 3, 1e-12))

        # Corrector with the Mehrotra second-order term, in scaled space.
        rc = []
        for (w, g, g_inv, lam, lw, lq), dxa, dza in zip(scal, dx, dz):
            dx_s = g_inv @ dxa @ g_inv
            dz_s = g @ dza @ g
            corr = (dx_s @ dz_s + dz_s @ dx_s) / 2.0
            r_lam = sigma * mu * np.eye(lam.shape[0]) - lam @ lam - corr
            r_lam = (r_lam + r_lam.conj().T) / 2.0
            s = _lyapunov_solve(r_lam, lw, lq)
            rc.append(g @ s @ g)

        dy = _solve_factored(factor, rp - comp.apply(rc) + comp.apply(w_rd_w), comp)
        dz = [r - a for r, a in zip(rd, comp.adjoint(dy))]
        dx = [c - w @ z_ @ w for c, w, z_ in zip(rc, ws, dz)]
        dx = [(d + d.conj().T) / 2.0 for d in dx]
        dz = [(d + d.conj().T) / 2.0 for d in dz]

        ap = min(1.0, STEP_FRACTION * min(
            _step_to_boundary(x, d) for x, d in zip(xs, dx)))
        ad = min(1.0, STEP_FRACTION * min(
            _step_to_boundary(z, d) for z, d in zip(zs, dz)))
        if ap < 1e-10 and ad < 1e-10:
            message = "step lengths collapsed; returning the best iterate"
            break

        xs = [(x + ap * d + (x + ap * d).conj().T) / 2.0 for x, d in zip(xs, dx)]
        y = y + ad * dy
        zs = [(z + ad * d + (z + ad * d).conj().T) / 2.0 for z, d in zip(zs, dz)]

    if best is None:  # pragma: no cover - loop always records an iterate
        return SdpSolution(status="maxiter", message="no iterate recorded")

    xs_b, y_b, zs_b, pobj, dobj, gap, rel_gap, pres, dres, best_it = best
    if status != "optimal" and best_merit <= LOOSE_MERIT:
        # near-optimal iterates can kill the Schur factorization or the
        # step sizes before the strict tolerance test fires
        status = "optimal"
        extra = f"accepted the best iterate at merit {best_merit:.3e}"
        message = f"{message}; {extra}" if message else extra
    if status != "optimal" and not message:
        message = f"iteration limit reached at merit {best_merit:.3e}"
    return SdpSolution(
        status=status,
        primal=xs_b,
        dual_y=_expand_dual(comp, y_b, problem.num_constraints),
        dual_slack=zs_b,
        primal_obj=pobj,
        dual_obj=dobj,
        duality_gap=gap,
        rel_gap=rel_gap,
        primal_residual=pres,
        dual_residual=dres,
        iterations=it,
        message=message,
    )


def _expand_dual(comp, y, p_full):
    """Reinsert zeros for dropped dependent rows."""
    if len(y) == p_full:
        return y
    full = np.zeros(p_full)
    full[comp.keep] = y
    return full


def _factor_with_retry(m):
    base = max(1.0, float(np.trace(m)) / max(1, m.shape[0]))
    regs = [0.0] + [base * 10.0 ** k for k in range(-14, -5, 3)]
    for reg in regs:
        try:
            return scipy.linalg.cho_factor(
                m + reg * np.eye(m.shape[0]), lower=True)
        except scipy.linalg.LinAlgError:
            continue
    return None


def _solve_factored(factor, rhs, comp):
    if comp.p == 0:
        return np.zeros(0)
    return scipy.linalg.cho_solve(factor, rhs)


def _infeasibility_certificate(comp, y):
    s = float(comp.b @ y)
    if s <= 0:
        return None
    y_ray = y / s
    margin = 0.0
    for a in comp.adjoint(y_ray):
        margin = min(margin, -float(np.linalg.eigvalsh((a + a.conj().T) / 2)[-1]))
    if margin >= -1e-7:
        return y_ray
    return None


def _unboundedness_certificate(comp, xs, pobj):
    if pobj >= 0:
        return None
    scale = -pobj
    x_ray = [x / scale for x in xs]
    if float(np.linalg.norm(comp.apply(x_ray))) <= 1e-7:
        return tuple(x_ray)
    return None
