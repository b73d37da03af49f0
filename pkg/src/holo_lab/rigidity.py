"""Rigidity checks for functions on the disc whose real part lives in [0, I].

The central objects: the real-linear transform F -> F(z) + z*conj(F(z))
(operator form F(z) + z F(z)^*), its exact algebraic inverse, the split of
the transformed function into two positive-real-part pieces, a convexity
diagnostic in the scalar case, and a verdict procedure that classifies a
candidate function as constant, hypothesis-violating, or (never, if the
theorem holds) inconclusive.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .disc import DomainError, mobius_phi, poisson_factor, wirtinger_dbar
from .operators import as_matrix, im_part, re_part

__all__ = [
    "CONSTANT_CONFIRMED",
    "HYPOTHESIS_VIOLATED",
    "INCONCLUSIVE",
    "DEGENERATE",
    "OperatorFunction",
    "constant_function",
    "RigidityReport",
    "ConvexityResult",
    "L_transform",
    "g_transform",
    "recover_F",
    "h_split",
    "re_h1_identity_check",
    "convexity_diagnostic",
    "rigidity_verdict",
    "BUILTIN_FUNCTIONS",
    "resolve_function",
]

CONSTANT_CONFIRMED = "CONSTANT_CONFIRMED"
HYPOTHESIS_VIOLATED = "HYPOTHESIS_VIOLATED"
INCONCLUSIVE = "INCONCLUSIVE"
DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class OperatorFunction:
    """A pure evaluator z -> d x d matrix on the open disc (d = 1 is scalar)."""

    dim: int
    evaluator: Callable
    name: str = ""

    def __call__(self, z):
        M = as_matrix(self.evaluator(z))
        if M.shape[0] != self.dim:
            raise ValueError(f"{self.name or 'function'} returned dim {M.shape[0]}, expected {self.dim}")
        return M

    def scalar(self, z):
        """Evaluate as a complex number (dim 1 only)."""
        if self.dim != 1:
            raise ValueError("scalar() requires dim 1")
        return complex(self(z)[0, 0])


def constant_function(C, name=""):
    C = as_matrix(C)
    return OperatorFunction(dim=C.shape[0], evaluator=lambda z, C=C: C, name=name or "const")


def L_transform(f):
    """Scalar real-linear transform: z -> f(z) + z*conj(f(z))."""
    return lambda z: f(z) + z * np.conj(f(z))


def g_transform(F):
    """Operator transform: z -> F(z) + z F(z)^* (agrees with L_transform at d = 1)."""
    def ev(z, F=F):
        M = F(z)
        return M + z * M.conj().T
    return OperatorFunction(dim=F.dim, evaluator=ev, name=f"g[{F.name}]")


def recover_F(g, z):
    """Exact inverse of g_transform: (g(z) - z g(z)^*)/(1 - |z|^2)."""
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("recover_F requires |z| < 1")
    G = g(z)
    return (G - z * G.conj().T) / (1 - abs(z) ** 2)


def h_split(g):
    """Split g into h1(z) = g(z)/(1 - z) and h2(z) = phi(z) I - h1(z).

    h1 + h2 = phi*I identically; both have positive-semidefinite real part
    whenever g arises from a function with real part in [0, I].
    """
    def h1(z, g=g):
        z = complex(z)
        if z == 1:
            raise DomainError("h1 is singular at z = 1")
        return g(z) / (1 - z)

    def h2(z, g=g, h1=h1):
        return mobius_phi(complex(z)) * np.eye(g.dim) - h1(z)

    return (
        OperatorFunction(dim=g.dim, evaluator=h1, name=f"h1[{g.name}]"),
        OperatorFunction(dim=g.dim, evaluator=h2, name=f"h2[{g.name}]"),
    )


def re_h1_identity_check(F, grid):
    """Max deviation of Re h1(z) from re_part(F(z)) * poisson_factor(z).

    This is an exact algebraic identity, so the return value measures
    round-off only.
    """
    h1, _ = h_split(g_transform(F))
    worst = 0.0
    for z in grid.points():
        dev = re_part(h1(z)) - re_part(F(z)) * poisson_factor(z)
        worst = max(worst, float(np.max(np.abs(dev))))
    return worst


@dataclass(frozen=True)
class ConvexityResult:
    status: str  # "OK" or DEGENERATE
    deviation: float  # max_j max_z |f_j(z) - phi(z)|; nan when degenerate


def convexity_diagnostic(F, grid, tol=1e-12):
    """Scalar diagnostic for the extreme-point argument.

    Builds f_j(z) = (h_j(z) - i Im h_j(0)) / Re h_j(0), normalized members
    of the class {f holomorphic, f(0) = 1, Re f > 0} that average to phi.
    When the hypotheses hold both must coincide with phi, so the returned
    deviation is ~0.  Re h_j(0) <= tol is the constant-h boundary case and
    is reported as DEGENERATE rather than a failure.
    """
    if F.dim != 1:
        raise ValueError("convexity_diagnostic is scalar-only (dim 1)")
    h1, h2 = h_split(g_transform(F))
    deviation = 0.0
    for h in (h1, h2):
        h0 = h.scalar(0)
        if h0.real <= tol:
            return ConvexityResult(status=DEGENERATE, deviation=float("nan"))
        f = lambda z, h=h, h0=h0: (h.scalar(z) - 1j * h0.imag) / h0.real
        assert abs(f(0) - 1) <= 1e-12
        for z in grid.points():
            deviation = max(deviation, abs(f(z) - mobius_phi(z)))
    return ConvexityResult(status="OK", deviation=float(deviation))


@dataclass(frozen=True)
class RigidityReport:
    strip_ok: bool
    holo_residual: float
    constancy_deviation: float
    recovered_constant: np.ndarray
    verdict: str


def rigidity_verdict(F, grid, eps_holo=1e-6, eps_const=1e-8, strip_tol=1e-10):
    """Classify F against the rigidity theorem.

    Checks (i) Re F(z) has spectrum in [0, 1] at every grid point, (ii) the
    transform F(z) + z F(z)^* is numerically holomorphic, (iii) F deviates
    from F(0) by at most eps_const.  CONSTANT_CONFIRMED needs all three;
    a failure of (i) or (ii) is HYPOTHESIS_VIOLATED; the remaining case is
    INCONCLUSIVE and would contradict the theorem.
    """
    pts = grid.points()
    values = np.stack([F(z) for z in pts])

    re_vals = (values + values.conj().transpose(0, 2, 1)) / 2
    eigs = np.linalg.eigvalsh(re_vals)
    strip_ok = bool(eigs.min() >= -strip_tol and eigs.max() <= 1 + strip_tol)

    g = g_transform(F)
    holo_residual = max(
        float(np.max(np.abs(wirtinger_dbar(g, z, grid.stencil_h)))) for z in pts
    )

    F0 = F(0)
    deviation = float(np.linalg.svd(values - F0, compute_uv=False)[:, 0].max())

    if strip_ok and holo_residual <= eps_holo and deviation <= eps_const:
        verdict = CONSTANT_CONFIRMED
    elif not strip_ok or holo_residual > eps_holo:
        verdict = HYPOTHESIS_VIOLATED
    else:
        verdict = INCONCLUSIVE
    return RigidityReport(
        strip_ok=strip_ok,
        holo_residual=holo_residual,
        constancy_deviation=deviation,
        recovered_constant=F0,
        verdict=verdict,
    )


def _scalar_fn(name, f):
    return OperatorFunction(dim=1, evaluator=lambda z, f=f: np.array([[f(complex(z))]]), name=name)


BUILTIN_FUNCTIONS = {
    "linear": _scalar_fn("linear", lambda z: 0.5 * z + 0.5),
    "re-plus-half": _scalar_fn("re-plus-half", lambda z: z.real + 0.5),
    "abs-shift": _scalar_fn("abs-shift", lambda z: 0.5 * abs(z) + 0.25),
    "phi": _scalar_fn("phi", mobius_phi),
}

# members expected to fail the rigidity hypotheses (used as negative controls)
NONCONSTANT_FAMILY = ("linear", "re-plus-half", "abs-shift")


def resolve_function(spec):
    """Look up a built-in test function by id; 'const:re,im' builds a constant."""
    if spec.startswith("const:"):
        parts = spec[len("const:"):].split(",")
        if len(parts) != 2:
            raise ValueError(f"bad constant spec {spec!r}; expected 'const:re,im'")
        c = complex(float(parts[0]), float(parts[1]))
        return constant_function(np.array([[c]]), name=spec)
    if spec in BUILTIN_FUNCTIONS:
        return BUILTIN_FUNCTIONS[spec]
    raise ValueError(f"unknown function id {spec!r}; known: {sorted(BUILTIN_FUNCTIONS)} or const:re,im")
