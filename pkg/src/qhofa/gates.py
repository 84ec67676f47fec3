"""Gate and state constructors: the standard example gates, diagonal operators,
random instances, stabilizer states, and the JSON gate/function formats."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, SpecError
from .operators import DenseOperator, StateOperator, as_operator
from .phase_space import PhasePoint, QuditParams
from .weyl import char_spectrum, weyl, weyl_table

GATE_NAMES = (
    "identity",
    "weyl",
    "fourier",
    "hadamard",
    "phase_s",
    "cnot",
    "t",
    "ccz",
    "diagonal",
    "custom",
)


@dataclass(frozen=True)
class GateSpec:
    """A named gate on a (d, n) system plus name-specific arguments.

    ``args`` carries ``point`` for weyl, ``values`` for diagonal and ``matrix``
    for custom.
    """

    name: str
    params: QuditParams
    args: dict = field(default_factory=dict, hash=False, compare=False)


def _omega_powers(d: int, exps) -> np.ndarray:
    return np.exp(2j * np.pi / d * (np.asarray(exps) % d))


def basis_digits(params: QuditParams) -> np.ndarray:
    """(d^n, n) array of the digits of every computational basis index."""
    return np.indices((params.d,) * params.n).reshape(params.n, -1).T


def fourier(params: QuditParams) -> DenseOperator:
    x = basis_digits(params)
    return DenseOperator(_omega_powers(params.d, x @ x.T) / np.sqrt(params.dim), params)


def phase_s(params: QuditParams) -> DenseOperator:
    """Quadratic phase gate sum_k zeta^{k^2} |k><k| on each qudit; S = diag(1, i) for qubits."""
    x = basis_digits(params)
    exps = (x**2).sum(axis=1)
    if params.d == 2:
        diag = 1j ** (exps % 4)
    else:
        diag = _omega_powers(params.d, params.half * exps)
    return DenseOperator(np.diag(diag), params)


def controlled_add(params: QuditParams, control: int, target: int) -> DenseOperator:
    """|x>_c |y>_t -> |x>_c |y + x>_t on the chosen qudits (CNOT / CSUM)."""
    if control == target or not (0 <= control < params.n and 0 <= target < params.n):
        raise SpecError(f"invalid control/target pair ({control}, {target}) for n={params.n}")
    x = basis_digits(params)
    out = x.copy()
    out[:, target] = (out[:, target] + out[:, control]) % params.d
    radix = params.d ** np.arange(params.n - 1, -1, -1)
    m = np.zeros((params.dim, params.dim))
    m[out @ radix, np.arange(params.dim)] = 1
    return DenseOperator(m, params)


def embed(single, j: int, params: QuditParams) -> DenseOperator:
    """Place a one-qudit matrix on qudit ``j`` of an n-qudit system."""
    single = np.asarray(single, dtype=complex)
    if single.shape != (params.d, params.d):
        raise DimensionError(f"expected a {params.d}x{params.d} matrix")
    out = np.eye(1, dtype=complex)
    for k in range(params.n):
        out = np.kron(out, single if k == j else np.eye(params.d))
    return DenseOperator(out, params)


def diagonal_from_function(f, params: QuditParams | None = None) -> DenseOperator:
    """B_f = sum_x f(x) |x><x| with f given in computational-basis order."""
    f = np.asarray(f, dtype=complex).reshape(-1)
    if params is None:
        params = QuditParams.for_dimension(f.size)
    if f.size != params.dim:
        raise DimensionError(f"function needs {params.dim} values, got {f.size}")
    return DenseOperator(np.diag(f), params)


def phase_function(params: QuditParams, poly) -> np.ndarray:
    """Values omega^{g(x)} for an integer-valued polynomial ``g(x_1, ..., x_n)``."""
    x = basis_digits(params)
    g = np.array([int(poly(*row)) for row in x])
    return _omega_powers(params.d, g)


def ccz_function(d: int = 2) -> np.ndarray:
    return phase_function(QuditParams(d, 3), lambda x, y, z: x * y * z)


def build(spec: GateSpec) -> DenseOperator:
    """Dense realization of a :class:`GateSpec`."""
    P, name = spec.params, spec.name
    if name == "identity":
        return DenseOperator(np.eye(P.dim), P)
    if name == "weyl":
        if "point" not in spec.args:
            raise SpecError("weyl gate needs a 'point' argument")
        return weyl(P, spec.args["point"])
    if name == "fourier":
        return fourier(P)
    if name == "hadamard":
        if P.d != 2:
            raise SpecError("hadamard is the d=2 Fourier gate; use 'fourier' for odd d")
        return fourier(P)
    if name == "phase_s":
        return phase_s(P)
    if name == "cnot":
        if P.n != 2:
            raise SpecError(f"cnot acts on n=2 qudits, got n={P.n}")
        return controlled_add(P, 0, 1)
    if name == "t":
        if (P.d, P.n) != (2, 1):
            raise SpecError("t is a single-qubit gate (d=2, n=1)")
        return DenseOperator(np.diag([1, np.exp(1j * np.pi / 4)]), P)
    if name == "ccz":
        if P.n != 3:
            raise SpecError(f"ccz acts on n=3 qudits, got n={P.n}")
        return diagonal_from_function(ccz_function(P.d), P)
    if name == "diagonal":
        if "values" not in spec.args:
            raise SpecError("diagonal gate needs 'values'")
        return diagonal_from_function(spec.args["values"], P)
    if name == "custom":
        if "matrix" not in spec.args:
            raise SpecError("custom gate needs 'matrix'")
        return DenseOperator(spec.args["matrix"], P)
    raise SpecError(f"unknown gate {name!r}; expected one of {', '.join(GATE_NAMES)}")


def named_gate(name: str, d: int = 2, n: int | None = None, **args) -> DenseOperator:
    """Convenience wrapper choosing the natural n for fixed-arity gates."""
    default_n = {"cnot": 2, "ccz": 3, "t": 1}.get(name, 1)
    return build(GateSpec(name, QuditParams(d, default_n if n is None else n), args))


# --- random instances -------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_operator(params: QuditParams, seed=None) -> DenseOperator:
    """Complex Ginibre matrix scaled so that ||B||_2 is of order one."""
    rng = _rng(seed)
    N = params.dim
    m = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))) / np.sqrt(2 * N)
    return DenseOperator(m, params)


def random_unitary(params: QuditParams, seed=None) -> DenseOperator:
    """Haar-random unitary from the QR factorization of a Ginibre matrix."""
    rng = _rng(seed)
    N = params.dim
    g = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    diag = np.diag(r)
    return DenseOperator(q * (diag / np.abs(diag)), params)


def random_pure_state(params: QuditParams, seed=None) -> StateOperator:
    rng = _rng(seed)
    psi = rng.normal(size=params.dim) + 1j * rng.normal(size=params.dim)
    return StateOperator.from_vector(psi, params)


def random_positive(params: QuditParams, seed=None) -> DenseOperator:
    """Random positive semidefinite operator G G^*."""
    g = random_operator(params, seed).matrix
    return DenseOperator(g @ g.conj().T, params)


def random_clifford_circuit(params: QuditParams, depth: int = 20, seed=None) -> DenseOperator:
    """Product of ``depth`` random gates drawn from {F_j, S_j, CNOT_ij}."""
    rng = _rng(seed)
    one_f = fourier(QuditParams(params.d, 1)).matrix
    one_s = phase_s(QuditParams(params.d, 1)).matrix
    u = np.eye(params.dim, dtype=complex)
    for _ in range(depth):
        kind = rng.integers(0, 3 if params.n > 1 else 2)
        if kind == 0:
            g = embed(one_f, int(rng.integers(params.n)), params).matrix
        elif kind == 1:
            g = embed(one_s, int(rng.integers(params.n)), params).matrix
        else:
            c, t = rng.choice(params.n, size=2, replace=False)
            g = controlled_add(params, int(c), int(t)).matrix
        u = g @ u
    return DenseOperator(u, params)


# --- stabilizer states ------------------------------------------------------

STABILIZER_SIZES = {(2, 1): 6, (2, 2): 60, (3, 1): 12}


def _lagrangian_generators(params: QuditParams):
    """Yield one generating set for every Lagrangian subspace of V^n."""
    d, n = params.d, params.n
    tab = weyl_table(params)
    pts = tab.points
    p, q = tab.p, tab.q
    seen = set()
    nonzero = range(1, len(pts))
    for combo in itertools.combinations(nonzero, n):
        ok = True
        for i, j in itertools.combinations(combo, 2):
            if (p[i] @ q[j] - q[i] @ p[j]) % d:
                ok = False
                break
        if not ok:
            continue
        span = set()
        for coeffs in itertools.product(range(d), repeat=n):
            v = sum(c * pts[i] for c, i in zip(coeffs, combo)) % d
            span.add(tuple(int(x) for x in v))
        if len(span) != d**n:
            continue
        key = frozenset(span)
        if key in seen:
            continue
        seen.add(key)
        yield combo


def stabilizer_states(params: QuditParams) -> list[StateOperator]:
    """All pure stabilizer states of a small system, by brute-force diagonalization."""
    if (params.d, params.n) not in STABILIZER_SIZES:
        raise SpecError(
            f"stabilizer enumeration supports (d, n) in {sorted(STABILIZER_SIZES)}, got {(params.d, params.n)}"
        )
    rng = np.random.default_rng(0)
    tab = weyl_table(params)
    states: dict[bytes, StateOperator] = {}
    for combo in _lagrangian_generators(params):
        mix = sum(
            (rng.normal() + 1j * rng.normal()) * tab.dense(i) for i in combo
        )
        _, vecs = np.linalg.eig(mix)
        for k in range(vecs.shape[1]):
            rho = StateOperator.from_vector(vecs[:, k], params)
            key = np.round(rho.matrix, 8).tobytes()
            states.setdefault(key, rho)
    out = list(states.values())
    for rho in out:
        mags = np.abs(char_spectrum(rho).coeffs)
        if not np.all((mags < 1e-9) | (np.abs(mags - 1 / params.dim) < 1e-9)):
            raise AssertionError("enumerated state fails the characteristic-function test")
    return out


# --- JSON formats -----------------------------------------------------------


def _complex_list(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def _parse_complex(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if len(pair) != 2:
        raise SpecError(f"complex entries are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def _load(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text()
    return json.loads(text)


def gate_from_json(source) -> DenseOperator:
    """Load ``{"d", "n", "matrix": [[[re, im], ...], ...]}`` (row-major)."""
    doc = _load(source)
    try:
        params = QuditParams(int(doc["d"]), int(doc["n"]))
        rows = doc["matrix"]
    except KeyError as exc:
        raise SpecError(f"gate JSON missing field {exc}") from None
    m = np.array([[_parse_complex(v) for v in row] for row in rows], dtype=complex)
    return DenseOperator(m, params)


def function_from_json(source) -> tuple[QuditParams, np.ndarray]:
    """Load ``{"d", "n", "values": [[re, im], ...]}`` in computational-basis order."""
    doc = _load(source)
    try:
        params = QuditParams(int(doc["d"]), int(doc["n"]))
        values = np.array([_parse_complex(v) for v in doc["values"]], dtype=complex)
    except KeyError as exc:
        raise SpecError(f"function JSON missing field {exc}") from None
    if values.size != params.dim:
        raise DimensionError(f"function needs {params.dim} values, got {values.size}")
    return params, values


def gate_to_json(op) -> dict:
    op = as_operator(op)
    return {"d": op.d, "n": op.n, "matrix": [_complex_list(row) for row in op.matrix]}


def function_to_json(params: QuditParams, values) -> dict:
    return {"d": params.d, "n": params.n, "values": _complex_list(np.asarray(values).reshape(-1))}


def state_from_json(source) -> StateOperator:
    """States share the gate schema (a density matrix under ``matrix``)."""
    op = gate_from_json(source)
    return StateOperator(op.matrix, op.params)


def point(params: QuditParams, *coords) -> PhasePoint:
    return PhasePoint.from_coords(params, coords)
