"""Small dense semidefinite programs over Hermitian matrices.

Problems have the form::

    max / min   C . X
    subject to  A_j . X  (<= | >= | =)  b_j,   X >= 0 (PSD, Hermitian)

where ``A . B = trace(A^H B)``. They are solved in the real symmetric
embedding (see :func:`afsec.numerics.complex_to_real`) by an infeasible
primal-dual interior-point method with the HKM search direction and
Mehrotra's predictor-corrector. Inequalities get nonnegative slack
variables, so the conic part is ``S_+ x R_+^p``.

The embedded problem is invariant under the complex-structure map
``Y -> J Y J^T``; the central path is therefore made of embedded Hermitian
matrices and the complex solution is read back with
:func:`afsec.numerics.real_to_complex`.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .numerics import complex_to_real, hermitian, hermitian_eig, real_to_complex

log = logging.getLogger(__name__)

RELATIONS = ("<=", ">=", "=")


class Constraint(NamedTuple):
    A: np.ndarray
    relation: str
    b: float


@dataclass
class SDPProblem:
    objective: np.ndarray
    sense: str = "max"
    constraints: list[Constraint] = field(default_factory=list)

    def __post_init__(self):
        self.objective = hermitian(self.objective)
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        n = self.n
        checked = []
        for A, rel, b in self.constraints:
            A = hermitian(A)
            if A.shape != (n, n):
                raise ValueError(f"constraint matrix {A.shape} does not match n={n}")
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            if not math.isfinite(b):
                raise ValueError("constraint right-hand side must be finite")
            checked.append(Constraint(A, rel, float(b)))
        self.constraints = checked

    @property
    def n(self) -> int:
        return self.objective.shape[0]

    def add(self, A, relation: str, b: float) -> "SDPProblem":
        self.constraints.append(Constraint(hermitian(A), relation, float(b)))
        self.__post_init__()
        return self

    def value(self, X) -> float:
        return frobenius(self.objective, X)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sense": self.sense,
            "objective": _matrix_to_json(self.objective),
            "constraints": [{"A": _matrix_to_json(c.A), "relation": c.relation, "b": c.b}
                            for c in self.constraints],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SDPProblem":
        return cls(_matrix_from_json(d["objective"]), d.get("sense", "max"),
                   [Constraint(_matrix_from_json(c["A"]), c["relation"], float(c["b"]))
                    for c in d.get("constraints", [])])

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n")

    @classmethod
    def load(cls, path) -> "SDPProblem":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _matrix_to_json(A) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(A, complex)]


def _matrix_from_json(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def frobenius(A, B) -> float:
    """``trace(A^H B)``, real for Hermitian arguments."""
    return float(np.real(np.vdot(np.asarray(A), np.asarray(B))))


@dataclass(frozen=True)
class SolverSettings:
    """Tolerances for :func:`solve`.

    ``eps_feas`` bounds each constraint violation relative to
    ``max(1, |b_j|)``, ``eps_gap`` the relative duality gap, ``eps_abs`` how
    negative the smallest eigenvalue of the returned matrix may be.
    ``step_fraction`` is the fraction of the distance to the cone boundary
    taken per iteration.
    """

    eps_feas: float = 1e-7
    eps_gap: float = 1e-9
    eps_abs: float = 1e-9
    eps_infeas: float = 1e-9
    max_iterations: int = 200
    step_fraction: float = 0.98

    def __post_init__(self):
        for name in ("eps_feas", "eps_gap", "eps_abs", "eps_infeas", "max_iterations"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.step_fraction < 1:
            raise ValueError("step_fraction must lie in (0, 1)")


@dataclass
class SDPSolution:
    X: np.ndarray
    objective_value: float
    status: str
    primal_residual: float
    eigenvalue_floor: float
    iterations: int = 0
    duality_gap: float = math.nan
    dual: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True)
class ResidualReport:
    """Signed slacks ``A_j . X - b_j``, their violations, and ``lambda_min(X)``."""

    slacks: np.ndarray
    violations: np.ndarray
    min_eigenvalue: float

    def max_relative_violation(self, b) -> float:
        if self.violations.size == 0:
            return 0.0
        return float(np.max(self.violations / np.maximum(1.0, np.abs(np.asarray(b)))))


def residuals(problem: SDPProblem, X) -> ResidualReport:
    X = hermitian(X)
    slacks = np.array([frobenius(c.A, X) - c.b for c in problem.constraints])
    viol = np.array([max(s, 0.0) if c.relation == "<=" else
                     max(-s, 0.0) if c.relation == ">=" else abs(s)
                     for s, c in zip(slacks, problem.constraints)])
    lam = float(np.linalg.eigvalsh(X)[0]) if X.size else 0.0
    return ResidualReport(slacks, viol, lam)


def extract_rank1(X) -> tuple[np.ndarray, float]:
    """Best rank-one factor ``v = sqrt(lambda_max) u_max`` of a PSD matrix.

    Returns ``v`` and the gap ``1 - lambda_max / trace``. A numerically zero
    matrix gives a zero vector and gap zero.
    """
    eig = hermitian_eig(X)
    w = np.clip(eig.eigenvalues, 0.0, None)
    total = float(np.sum(w))
    if total <= 1e-300 or w[0] <= 1e-14 * max(1.0, float(np.max(np.abs(eig.eigenvalues)))):
        return np.zeros(X.shape[0], dtype=complex), 0.0
    v = math.sqrt(w[0]) * eig.eigenvectors[:, 0]
    return v, float(min(max(1.0 - w[0] / total, 0.0), 1.0))


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest alpha with ``X + alpha dX`` PSD (``X`` positive definite)."""
    w, V = np.linalg.eigh(X)
    if w[0] <= 0:
        return 0.0
    r = 1.0 / np.sqrt(w)
    T = (V.T @ dX @ V) * np.outer(r, r)
    lam = np.linalg.eigvalsh((T + T.T) / 2)[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    return float(np.min(-x[neg] / dx[neg])) if np.any(neg) else math.inf


def solve(problem: SDPProblem, settings: SolverSettings | None = None) -> SDPSolution:
    """Solve a Hermitian SDP; see the module docstring for the method."""
    settings = settings or SolverSettings()
    n = problem.n
    cons = problem.constraints
    m = len(cons)
    sign = 1.0 if problem.sense == "min" else -1.0
    if n == 0:
        return SDPSolution(np.zeros((0, 0), complex), 0.0, "optimal", 0.0, 0.0)

    N = 2 * n
    # embedding halves Frobenius products: A . X = <emb(A), emb(X)> / 2
    C = sign * complex_to_real(problem.objective) / 2
    A = np.array([complex_to_real(c.A) / 2 for c in cons]).reshape(m, N, N)
    b = np.array([c.b for c in cons], dtype=float)

    # row scaling: unit right-hand sides where possible
    row_scale = np.ones(m)
    for j in range(m):
        normA = np.linalg.norm(A[j])
        if b[j] != 0.0:
            row_scale[j] = 1.0 / abs(b[j])
        elif normA > 0:
            row_scale[j] = 1.0 / normA
    A = A * row_scale[:, None, None]
    b = b * row_scale
    c_scale = np.linalg.norm(C)
    c_scale = c_scale if c_scale > 0 else 1.0
    C = C / c_scale

    # slack columns: +1 for <=, -1 for >=
    slack_rows = [j for j, c in enumerate(cons) if c.relation != "="]
    p = len(slack_rows)
    D = np.zeros((m, p))
    for l, j in enumerate(slack_rows):
        D[j, l] = 1.0 if cons[j].relation == "<=" else -1.0

    normA = np.array([np.linalg.norm(A[j]) for j in range(m)])
    xi = max(10.0, math.sqrt(N), float(np.max(N * (1 + np.abs(b)) / (1 + normA))) if m else 0.0)
    eta = max(10.0, math.sqrt(N), float(np.max(normA)) if m else 0.0, 1.0)
    Y = xi * np.eye(N)
    Z = eta * np.eye(N)
    s = xi * np.ones(p)
    t = eta * np.ones(p)
    y = np.zeros(m)

    def A_op(X):
        return np.einsum("jab,ab->j", A, X)

    def At_op(v):
        return np.einsum("j,jab->ab", v, A)

    target = settings.eps_feas * 1e-2
    status = "max-iterations"
    best = None
    best_mu = (math.inf, 0)
    it = 0
    for it in range(1, settings.max_iterations + 1):
        rp = b - A_op(Y) - D @ s
        Rd = C - At_op(y) - Z
        rt = -D.T @ y - t
        mu = (float(np.sum(Y * Z)) + float(s @ t)) / (N + p)
        pobj = float(np.sum(C * Y))
        dobj = float(b @ y)
        feas_p = float(np.max(np.abs(rp))) if m else 0.0
        feas_d = (float(np.linalg.norm(Rd)) + float(np.linalg.norm(rt))) / 2.0
        gap = abs(pobj - dobj) / max(abs(pobj), abs(dobj), 1e-12)
        log.debug("it %3d  pinf %.2e  dinf %.2e  gap %.2e  mu %.2e  pobj %.9g  dobj %.9g",
                  it, feas_p, feas_d, gap, mu, pobj, dobj)
        merit = max(feas_p / target, feas_d / target, gap / settings.eps_gap)
        if best is None or merit < best[0]:
            best = (merit, it, Y, y, feas_p, feas_d, gap)
        if mu < 0.5 * best_mu[0]:
            best_mu = (mu, it)
        if merit <= 1.0:
            status = "optimal"
            break
        # Farkas-type certificates from diverging iterates
        if dobj > 0 and (1.0 + np.linalg.norm(Rd) + np.linalg.norm(rt)) / dobj < settings.eps_infeas:
            status = "infeasible"
            break
        if pobj < 0 and (np.linalg.norm(b - rp) + 1.0) / (-pobj) < settings.eps_infeas:
            status = "unbounded"
            break
        # late iterations lose primal accuracy to Schur-complement conditioning
        if it - best[1] >= 6 and it - best_mu[1] >= 6:
            break

        try:
            Lz = np.linalg.cholesky(Z)
        except np.linalg.LinAlgError:
            break
        Zinv = scipy.linalg.cho_solve((Lz, True), np.eye(N))
        G = np.einsum("ab,jbc,cd->jad", Y, A, Zinv)
        st = s / t
        M = np.einsum("iab,jba->ij", A, G) + (D * st) @ D.T
        M = (M + M.T) / 2
        try:
            fac = scipy.linalg.cho_factor(M)
            solve_M = lambda r: scipy.linalg.cho_solve(fac, r)  # noqa: E731
        except np.linalg.LinAlgError:
            solve_M = lambda r: np.linalg.lstsq(M, r, rcond=None)[0]  # noqa: E731

        def direction(sig_mu, corr_Y, corr_s):
            # dY = sig_mu Zinv - Y - Y dZ Zinv - corr_Y, dZ = Rd - At(dy)
            base_Y = sig_mu * Zinv - Y - Y @ Rd @ Zinv - corr_Y
            base_s = sig_mu / t - s - st * rt - corr_s
            rhs = rp - A_op(base_Y) - D @ base_s
            dy = solve_M(rhs)
            # refinement keeps primal residuals from drifting as M degrades
            for _ in range(2):
                dy = dy + solve_M(rhs - M @ dy)
            dZ = Rd - At_op(dy)
            dY = sig_mu * Zinv - Y - Y @ dZ @ Zinv - corr_Y
            dY = (dY + dY.T) / 2
            dt = rt - D.T @ dy
            ds = sig_mu / t - s - st * dt - corr_s
            return dY, dZ, ds, dt, dy

        # predictor
        dY, dZ, ds, dt, dy = direction(0.0, 0.0, 0.0)
        ap = min(1.0, _max_step(Y, dY), _max_step_lp(s, ds))
        ad = min(1.0, _max_step(Z, dZ), _max_step_lp(t, dt))
        mu_aff = (float(np.sum((Y + ap * dY) * (Z + ad * dZ)))
                  + float((s + ap * ds) @ (t + ad * dt))) / (N + p)
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
        # corrector with the second-order term
        dY, dZ, ds, dt, dy = direction(sigma * mu, dY @ dZ @ Zinv, ds * dt / t)
        gam = settings.step_fraction
        ap = min(1.0, gam * _max_step(Y, dY), gam * _max_step_lp(s, ds))
        ad = min(1.0, gam * _max_step(Z, dZ), gam * _max_step_lp(t, dt))
        if ap < 1e-12 and ad < 1e-12:
            break
        Y = (Y + ap * dY + (Y + ap * dY).T) / 2
        s = s + ap * ds
        Z = (Z + ad * dZ + (Z + ad * dZ).T) / 2
        t = t + ad * dt
        y = y + ad * dy
        if not (np.all(np.isfinite(Y)) and np.all(np.isfinite(y))):
            break

    if status == "max-iterations" and best is not None:
        _, _, Y, y, feas_p, feas_d, gap = best
        if feas_p <= settings.eps_feas and feas_d <= settings.eps_feas \
                and gap <= 100 * settings.eps_gap:
            status = "optimal"

    X = real_to_complex(Y)
    report = residuals(problem, X)
    value = problem.value(X)
    dual = sign * y * row_scale * c_scale
    prim_res = report.max_relative_violation([c.b for c in cons])
    sol = SDPSolution(X=X, objective_value=value, status=status, primal_residual=prim_res,
                      eigenvalue_floor=report.min_eigenvalue, iterations=it,
                      duality_gap=gap, dual=dual)
    if status == "optimal" and (prim_res > settings.eps_feas
                                or report.min_eigenvalue < -settings.eps_abs):
        sol.status = "max-iterations"
    return sol
