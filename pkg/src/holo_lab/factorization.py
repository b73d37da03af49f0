"""Classification of commuting factorizations of the truncated-shift symbol.

Every factorization is parametrized by a self-adjoint A and a positive
contraction B: the two factor symbols are matrix exponentials
phi_{1,t}(z) = exp(t[iA - phi(z)B]) and phi_{2,t}(z) = exp(t[-iA -
phi(z)(I-B)]), whose exponents commute for every z, so their product is
exp(-t phi(z)) I exactly.  The Cayley transform converts between (A, B)
and the factorizing pair (psi_1, psi_2) solving

    inverse_cayley(psi_1(z)) + inverse_cayley(psi_2(z)) = phi(z) I.

Internal canonical form: h1(z) = phi(z) B - i A, so phi_{1,t} = exp(-t h1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disc import DomainError, mobius_phi, varphi_t
from .operators import (
    as_matrix,
    cayley,
    im_part,
    inverse_cayley,
    is_positive_contraction,
    matrix_exp,
    matrix_from_jsonable,
    matrix_to_jsonable,
    operator_norm,
    re_part,
    require_self_adjoint,
)
from .rigidity import OperatorFunction

__all__ = [
    "FactorParams",
    "FactorPair",
    "random_params",
    "build_h1",
    "pair_from_params",
    "phi_jt",
    "FactorizationReport",
    "verify_factorization",
    "verify_master",
    "recover_params",
    "DEFAULT_T_LIST",
    "EXP_NORM_BUDGET",
]

DEFAULT_T_LIST = (0.0, 0.25, 0.5, 1.0, 2.0)

# matrix_exp is trusted for exponent norms up to this; points beyond are skipped
EXP_NORM_BUDGET = 100.0


@dataclass(frozen=True)
class FactorParams:
    """Pair (A, B): A self-adjoint, 0 <= B <= I.  Parametrizes a factorization."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = require_self_adjoint(as_matrix(self.A), tol=1e-12, name="A")
        B = as_matrix(self.B)
        if A.shape != B.shape:
            raise ValueError("A and B must have the same dimension")
        if not is_positive_contraction(B, tol=1e-12):
            raise ValueError("B violates the 0 <= B <= I invariant")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self):
        return self.A.shape[0]

    def to_jsonable(self):
        return {"dim": self.dim, "A": matrix_to_jsonable(self.A), "B": matrix_to_jsonable(self.B)}

    @classmethod
    def from_jsonable(cls, data):
        if set(data) != {"dim", "A", "B"}:
            raise ValueError(f"params must have exactly the fields dim, A, B; got {sorted(data)}")
        A = matrix_from_jsonable(data["A"], name="A")
        B = matrix_from_jsonable(data["B"], name="B")
        if A.shape[0] != data["dim"]:
            raise ValueError("dim field does not match matrix size")
        return cls(A=A, B=B)


@dataclass(frozen=True)
class FactorPair:
    """Contraction-valued pair (psi_1, psi_2) satisfying the master equation."""

    psi1: OperatorFunction
    psi2: OperatorFunction


def random_params(rng, dim, a_norm=2.0):
    """Seeded random (A, B): Gaussian self-adjoint A with ||A|| <= a_norm,
    B = V diag(u) V* with u uniform in [0, 1] and Haar-ish V from QR."""
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    A = (G + G.conj().T) / 2
    nrm = operator_norm(A)
    if nrm > a_norm:
        A = A * (a_norm / nrm)
    V, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    u = rng.uniform(0.0, 1.0, size=dim)
    B = (V * u) @ V.conj().T
    return FactorParams(A=(A + A.conj().T) / 2, B=(B + B.conj().T) / 2)


def build_h1(params, z):
    """h1(z) = phi(z) B - i A; exp(-t h1) is the first factor symbol."""
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("build_h1 requires |z| < 1")
    return mobius_phi(z) * params.B - 1j * params.A


def pair_from_params(params):
    """Cayley-transform (A, B) into the factorizing pair (psi_1, psi_2)."""
    eye = np.eye(params.dim)

    def psi1(z, params=params):
        return cayley(build_h1(params, z))

    def psi2(z, params=params, eye=eye):
        return cayley(mobius_phi(complex(z)) * eye - build_h1(params, z))

    return FactorPair(
        psi1=OperatorFunction(params.dim, psi1, "psi1"),
        psi2=OperatorFunction(params.dim, psi2, "psi2"),
    )


def _exponent(params, j, z):
    phi = mobius_phi(complex(z))
    if j == 1:
        return 1j * params.A - phi * params.B
    if j == 2:
        return -1j * params.A - phi * (np.eye(params.dim) - params.B)
    raise ValueError("j must be 1 or 2")


def phi_jt(params, j, t, z):
    """Factor symbol phi_{j,t}(z) = exp(t * exponent_j(z)); a contraction."""
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("phi_jt requires |z| < 1")
    if t < 0:
        raise ValueError("phi_jt requires t >= 0")
    return matrix_exp(t * _exponent(params, j, z))


@dataclass(frozen=True)
class FactorizationReport:
    """Worst residual per factorization axiom, plus skipped-point count."""

    product_residual: float
    commutation_residual: float
    contractivity_excess: float
    semigroup_residual: float
    n_checked: int
    n_skipped: int

    def passed(self, tol):
        return (
            self.product_residual <= tol
            and self.commutation_residual <= tol
            and self.contractivity_excess <= tol
            and self.semigroup_residual <= tol
        )

    def worst(self):
        return max(
            self.product_residual,
            self.commutation_residual,
            self.contractivity_excess,
            self.semigroup_residual,
        )


def verify_factorization(params, t_list=DEFAULT_T_LIST, grid=None, exp_budget=EXP_NORM_BUDGET):
    """Check the four factorization axioms over (t, z) in t_list x grid.

    (i) product phi_{1,t} phi_{2,t} = e^{-t phi} I; (ii) the factors
    commute; (iii) each factor is a contraction; (iv) the semigroup law for
    consecutive t, s in t_list.  Points whose exponent-norm estimate
    exceeds exp_budget are skipped and counted.
    """
    from .disc import default_grid

    if grid is None:
        grid = default_grid()
    t_list = sorted(float(t) for t in t_list)
    a_norm = operator_norm(params.A)
    eye = np.eye(params.dim)
    prod_res = comm_res = contr_exc = semi_res = 0.0
    n_checked = n_skipped = 0

    for z in grid.points():
        phi_abs = abs(mobius_phi(z))
        exps = {j: _exponent(params, j, z) for j in (1, 2)}

        def budget_ok(t):
            return t * (a_norm + phi_abs) <= exp_budget

        factors = {}
        for t in t_list:
            if not budget_ok(t):
                n_skipped += 1
                continue
            P1 = matrix_exp(t * exps[1])
            P2 = matrix_exp(t * exps[2])
            factors[t] = (P1, P2)
            prod_res = max(prod_res, operator_norm(P1 @ P2 - varphi_t(t, z) * eye))
            comm_res = max(comm_res, operator_norm(P1 @ P2 - P2 @ P1))
            contr_exc = max(contr_exc, operator_norm(P1) - 1, operator_norm(P2) - 1)
            n_checked += 1
        for t, s in zip(t_list, t_list[1:]):
            if t in factors and s in factors and budget_ok(t + s):
                for j in (0, 1):
                    Pts = matrix_exp((t + s) * exps[j + 1])
                    semi_res = max(semi_res, operator_norm(Pts - factors[t][j] @ factors[s][j]))
            else:
                n_skipped += 1
    return FactorizationReport(
        product_residual=prod_res,
        commutation_residual=comm_res,
        contractivity_excess=max(contr_exc, 0.0),
        semigroup_residual=semi_res,
        n_checked=n_checked,
        n_skipped=n_skipped,
    )


def verify_master(pair, grid=None):
    """Max grid residual of the master equation, and the min margin of I - psi_j.

    Returns (residual, margin): residual = max_z ||ic(psi1) + ic(psi2) -
    phi(z) I||; margin = min_z,j sigma_min(I - psi_j(z)), the numerical
    distance of 1 from the spectrum of psi_j.
    """
    from .disc import default_grid

    if grid is None:
        grid = default_grid()
    dim = pair.psi1.dim
    eye = np.eye(dim)
    residual, margin = 0.0, np.inf
    for z in grid.points():
        P1, P2 = pair.psi1(z), pair.psi2(z)
        for P in (P1, P2):
            margin = min(margin, float(np.linalg.svd(eye - P, compute_uv=False)[-1]))
        residual = max(
            residual,
            operator_norm(inverse_cayley(P1) + inverse_cayley(P2) - mobius_phi(z) * eye),
        )
    return residual, margin


def recover_params(pair, grid=None):
    """Read (A, B) back off a factorizing pair.

    h1(0) = inverse_cayley(psi1(0)) = B - iA fixes the parameters; the
    returned residual max_z ||inverse_cayley(psi1(z)) - (phi(z)B - iA)||
    certifies that the pair really is of the classified exponential form.
    """
    from .disc import default_grid

    if grid is None:
        grid = default_grid()
    h10 = inverse_cayley(pair.psi1(0))
    B = re_part(h10)
    A = -im_part(h10)
    params = FactorParams(A=A, B=B)
    residual = 0.0
    for z in grid.points():
        dev = inverse_cayley(pair.psi1(z)) - build_h1(params, z)
        residual = max(residual, operator_norm(dev))
    return params, residual
