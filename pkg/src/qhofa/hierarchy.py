"""Clifford-hierarchy level classification and the hierarchy-overlap measure.

Two independent routes decide the level of a unitary:

* analytic: U is at level k iff ||U||_{Q^{k+1}} = 1 (up to ``tol``);
* algebraic: level 1 is "Weyl up to phase", level 2 is "Clifford", and level
  k > 2 holds when every derivative d_a U sits at level k - 1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .derivative import all_derivatives
from .errors import CapabilityError, PreconditionError, SpecError
from .gates import controlled_add, embed, fourier, phase_s
from .operators import DenseOperator, as_operator, equal_up_to_phase
from .phase_space import PhasePoint, QuditParams
from .uniformity import q_measure_exact
from .weyl import char_spectrum, weyl_table

MEMBERSHIP_TOL = 1e-8
NEAR_THRESHOLD = 1e-6
CLOSURE_CEILING = 10**6


@dataclass
class HierarchyVerdict:
    """Smallest confirmed level (or ``None`` when above ``max_k``) plus evidence."""

    level: int | None
    method: str
    per_k: list = field(default_factory=list)
    flagged: bool = False

    @property
    def label(self):
        return self.level if self.level is not None else "above max tested"

    def as_dict(self) -> dict:
        return {"level": self.label, "per_k": self.per_k, "method": self.method, "flagged": self.flagged}


def _require_unitary(U) -> DenseOperator:
    U = as_operator(U)
    if not U.is_unitary():
        raise PreconditionError("hierarchy classification needs a unitary input")
    return U


def classify_analytic(U, max_k: int = 3, tol: float = MEMBERSHIP_TOL, threads: int = 1) -> HierarchyVerdict:
    """Level = min k with | ||U||_{Q^{k+1}} - 1 | <= tol, stopping at the first hit.

    Gaps between ``tol`` and 1e-6 are near the threshold: they are recorded and
    the verdict is flagged instead of being trusted either way.
    """
    U = _require_unitary(U)
    verdict = HierarchyVerdict(None, "analytic")
    for k in range(1, max_k + 1):
        q = q_measure_exact(U, k + 1, threads=threads).value
        gap = abs(q - 1.0)
        verdict.per_k.append({"k": k + 1, "q_value": q, "gap": gap})
        if gap <= tol:
            verdict.level = k
            break
        if gap < NEAR_THRESHOLD:
            verdict.flagged = True
    return verdict


def is_weyl_up_to_phase(U) -> bool:
    """True when U = c w(b) for a unit scalar c and some b."""
    U = as_operator(U)
    coeffs = char_spectrum(U).coeffs
    b = int(np.argmax(np.abs(coeffs)))
    ok, _ = equal_up_to_phase(U, weyl_table(U.params).dense(b))
    return ok


def _generator_indices(params: QuditParams) -> list[int]:
    """Point indices of the unit vectors e_{p_j}, e_{q_j}."""
    out = []
    for j in range(2 * params.n):
        coords = [0] * (2 * params.n)
        coords[j] = 1
        out.append(PhasePoint(params, tuple(coords)).index)
    return out


def is_clifford(U) -> bool:
    """U w(a) U^* is a Weyl operator up to phase for every generator direction a."""
    U = as_operator(U)
    if not U.is_unitary():
        return False
    tab = weyl_table(U.params)
    m = U.matrix
    return all(is_weyl_up_to_phase(m @ tab.dense(i) @ m.conj().T) for i in _generator_indices(U.params))


def fingerprint(m: np.ndarray) -> bytes:
    """Phase-canonical hash key: rotate the first non-negligible entry to the positive reals."""
    flat = np.asarray(m).reshape(-1)
    nz = np.flatnonzero(np.abs(flat) > 1e-6)
    if nz.size:
        flat = flat * (abs(flat[nz[0]]) / flat[nz[0]])
    key = np.round(flat, 9) + 0.0  # folds -0.0 into 0.0
    return np.ascontiguousarray(key).tobytes()


class AlgebraicClassifier:
    """Recursive membership test with a memo keyed on phase-canonical fingerprints."""

    def __init__(self):
        self.memo: dict = {}

    def member(self, m: np.ndarray, params: QuditParams, k: int) -> bool:
        key = (fingerprint(m), params, k)
        if key in self.memo:
            return self.memo[key]
        op = DenseOperator(m, params)
        if k == 1:
            res = is_weyl_up_to_phase(op)
        elif k == 2:
            res = is_clifford(op)
        else:
            res = all(self.member(D, params, k - 1) for D in all_derivatives(m, params))
        self.memo[key] = res
        return res


def classify_algebraic(U, max_k: int = 3, classifier: AlgebraicClassifier | None = None) -> HierarchyVerdict:
    U = _require_unitary(U)
    cls = classifier or AlgebraicClassifier()
    verdict = HierarchyVerdict(None, "algebraic")
    for k in range(1, max_k + 1):
        hit = cls.member(U.matrix, U.params, k)
        verdict.per_k.append({"k": k, "member": hit})
        if hit:
            verdict.level = k
            break
    return verdict


def classify(U, max_k: int = 3, method: str = "both", tol: float = MEMBERSHIP_TOL, threads: int = 1) -> dict:
    """Run one or both routes; with ``both`` the result records whether they agree."""
    out = {}
    if method in ("analytic", "both"):
        out["analytic"] = classify_analytic(U, max_k, tol, threads)
    if method in ("algebraic", "both"):
        out["algebraic"] = classify_algebraic(U, max_k)
    if not out:
        raise SpecError(f"unknown classification method {method!r}")
    levels = {v.level for v in out.values()}
    res = {name: v.as_dict() for name, v in out.items()}
    res["level"] = next(iter(out.values())).label
    res["agree"] = len(levels) == 1
    return res


# --- Clifford group ---------------------------------------------------------------

CLIFFORD_SIZES = {(2, 1): 24, (3, 1): 216, (2, 2): 11520}


def clifford_generators(params: QuditParams) -> list[np.ndarray]:
    one = QuditParams(params.d, 1)
    F, S = fourier(one).matrix, phase_s(one).matrix
    Z = np.diag(np.exp(2j * np.pi * np.arange(params.d) / params.d))
    gens = []
    for j in range(params.n):
        for g in (F, S, Z):
            gens.append(embed(g, j, params).matrix)
    for c in range(params.n):
        for t in range(params.n):
            if c != t:
                gens.append(controlled_add(params, c, t).matrix)
    return gens


@dataclass(frozen=True)
class CliffordGroup:
    params: QuditParams
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def stack(self) -> np.ndarray:
        return np.stack([e.matrix for e in self.elements])


def enumerate_clifford(params: QuditParams, allow_large: bool = False) -> CliffordGroup:
    """Breadth-first closure of the generators, deduplicated up to global phase."""
    key = (params.d, params.n)
    if key not in CLIFFORD_SIZES or (key == (2, 2) and not allow_large):
        raise CapabilityError(
            f"Clifford enumeration supports (2, 1) and (3, 1)"
            f"{' and (2, 2) with allow_large=True' if key == (2, 2) else ''}; got {key}"
        )
    return _enumerate_clifford(params)


@lru_cache(maxsize=4)
def _enumerate_clifford(params: QuditParams) -> CliffordGroup:
    gens = clifford_generators(params)
    start = np.eye(params.dim, dtype=complex)
    seen = {fingerprint(start)}
    found = [start]
    queue = deque([start])
    products = 0
    while queue:
        g = queue.popleft()
        for h in gens:
            products += 1
            if products > CLOSURE_CEILING:
                raise CapabilityError("Clifford closure exceeded its product ceiling")
            m = h @ g
            fp = fingerprint(m)
            if fp not in seen:
                seen.add(fp)
                found.append(m)
                queue.append(m)
    return CliffordGroup(params, tuple(DenseOperator(m, params) for m in found))


def overlap_measure(U, k: int, group: CliffordGroup | None = None) -> float:
    """||U||_{q^{k+1}} = max over V in C^(k) of |<V, U>|^2, for k in {1, 2}."""
    U = as_operator(U)
    if k == 1:
        return float(np.max(np.abs(char_spectrum(U).coeffs)) ** 2)
    if k == 2:
        group = group or enumerate_clifford(U.params)
        inner = np.einsum("gij,ij->g", group.stack().conj(), U.matrix) / U.dim
        return float(np.max(np.abs(inner)) ** 2)
    raise CapabilityError(f"level {k} of the hierarchy is not enumerable; overlap supports k in {{1, 2}}")
