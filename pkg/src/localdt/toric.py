"""Local toric Calabi-Yau threefolds built from smooth complete 2D fans.

Conventions: rays and cones are indexed from 0.  The lifted fan of a surface
with ``r - 1`` rays has ``r`` rays; the last one (index ``r - 1``) is the
vertical ray ``(0, 0, 1)``.  Maximal cone ``k`` is ``(k, k + 1, r - 1)`` with
``k + 1`` taken modulo ``r - 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .errors import NoIntegerSolution, NotAdjacent, NotComplete, NotPrimitive, NotSmooth

Vec2 = tuple[int, int]
Vec3 = tuple[int, int, int]
Matrix3 = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]


def det2(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[1] - u[1] * v[0]


def det3(m: Sequence[Sequence[int]]) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def inverse3(m: Sequence[Sequence[int]]) -> Matrix3:
    """Inverse of a unimodular integer 3x3 matrix."""
    d = det3(m)
    if d not in (1, -1):
        raise ValueError("matrix is not unimodular")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[m[r][c] for c in range(3) if c != j] for r in range(3) if r != i]
            cof[i][j] = (-1) ** (i + j) * det2(minor[0], minor[1])
    # adjugate / det
    return tuple(tuple(cof[j][i] * d for j in range(3)) for i in range(3))  # type: ignore[return-value]


def matmul3(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3)
    )  # type: ignore[return-value]


def transpose3(a: Sequence[Sequence[int]]) -> Matrix3:
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))  # type: ignore[return-value]


IDENTITY3: Matrix3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass(frozen=True)
class Fan2D:
    rays: tuple[Vec2, ...]

    def __len__(self) -> int:
        return len(self.rays)

    def ray(self, i: int) -> Vec2:
        return self.rays[i % len(self.rays)]

    def to_json(self) -> dict[str, object]:
        return {"rays2d": [list(v) for v in self.rays]}


def make_fan2d(rays: Sequence[Sequence[int]]) -> Fan2D:
    """Validate a smooth complete fan given by counterclockwise ordered rays."""
    vs: list[Vec2] = []
    for v in rays:
        if len(v) != 2 or not all(isinstance(c, int) for c in v):
            raise ValueError(f"ray {v!r} is not an integer 2-vector")
        vs.append((v[0], v[1]))
    if len(vs) < 3:
        raise NotComplete("a complete fan needs at least 3 rays")
    for v in vs:
        if math.gcd(*v) != 1:
            raise NotPrimitive(f"ray {v} is not primitive")
    m = len(vs)
    for i in range(m):
        u, w = vs[i], vs[(i + 1) % m]
        if det2(u, w) != 1:
            raise NotSmooth(f"rays {u}, {w} have determinant {det2(u, w)}, expected +1")
    # every step turns by an angle in (0, pi); the total must be one full turn
    total = sum(
        math.atan2(det2(vs[i], vs[(i + 1) % m]), vs[i][0] * vs[(i + 1) % m][0] + vs[i][1] * vs[(i + 1) % m][1])
        for i in range(m)
    )
    winding = round(total / (2 * math.pi))
    if winding != 1:
        raise NotComplete(f"rays wind {winding} times around the origin")
    return Fan2D(tuple(vs))


def fan_from_json(text: str) -> Fan2D:
    doc = json.loads(text)
    return make_fan2d([tuple(v) for v in doc["rays2d"]])


def p2_fan() -> Fan2D:
    return make_fan2d([(1, 0), (0, 1), (-1, -1)])


def hirzebruch_fan(n: int) -> Fan2D:
    return make_fan2d([(1, 0), (0, 1), (-1, n), (0, -1)])


@dataclass(frozen=True)
class LocalFan:
    base: Fan2D
    rays3: tuple[Vec3, ...]
    maxcones: tuple[tuple[int, int, int], ...]

    @property
    def r(self) -> int:
        return len(self.rays3)

    @property
    def vertical(self) -> int:
        return self.r - 1


def lift_local(fan: Fan2D) -> LocalFan:
    m = len(fan)
    rays3 = tuple((v[0], v[1], 1) for v in fan.rays) + ((0, 0, 1),)
    cones = tuple((k, (k + 1) % m, m) for k in range(m))
    for cone in cones:
        if abs(det3([rays3[i] for i in cone])) != 1:
            raise NotSmooth(f"cone {cone} is not unimodular")
    return LocalFan(fan, rays3, cones)


@dataclass(frozen=True)
class RelationBasis:
    rows: tuple[tuple[int, ...], ...]

    def residual(self, lf: LocalFan) -> list[tuple[int, int, int]]:
        return [
            tuple(sum(a * v[k] for a, v in zip(row, lf.rays3)) for k in range(3))  # type: ignore[misc]
            for row in self.rows
        ]


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of ``{a : sum_i a_i rows[i] = 0}`` by integer row reduction of ``[rows | I]``."""
    n = len(rows)
    width = len(rows[0]) if rows else 0
    aug = [list(rows[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    pivot_row = 0
    for col in range(width):
        while True:
            nz = [i for i in range(pivot_row, n) if aug[i][col] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(aug[i][col]))
            aug[pivot_row], aug[p] = aug[p], aug[pivot_row]
            done = True
            for i in range(pivot_row + 1, n):
                q = aug[i][col] // aug[pivot_row][col]
                if q:
                    aug[i] = [a - q * b for a, b in zip(aug[i], aug[pivot_row])]
                if aug[i][col] != 0:
                    done = False
            if done:
                pivot_row += 1
                break
        if pivot_row == n:
            break
    return [row[width:] for row in aug[pivot_row:]]


def _contract_coefficient(rows: Sequence[Sequence[int]], keep: Sequence[int], r: int) -> int:
    """Coefficient of ``dx_keep`` (in the given order) in ``i_{chi_1} ... i_{chi_k}(dx_1 ^ ... ^ dx_r)``.

    All coordinates outside ``keep`` are set to 1, which is the restriction to
    the affine chart of the cone spanned by ``keep``.
    """
    form: dict[tuple[int, ...], int] = {tuple(range(r)): 1}
    for row in reversed(rows):
        nxt: dict[tuple[int, ...], int] = {}
        for idx, c in form.items():
            for pos, j in enumerate(idx):
                if j in keep or row[j] == 0:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                nxt[rest] = nxt.get(rest, 0) + (-1) ** pos * row[j] * c
        form = {k: v for k, v in nxt.items() if v}
    coeff = form.get(tuple(sorted(keep)), 0)
    perm = [sorted(keep).index(k) for k in keep]
    inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
    return coeff * (-1) ** inversions


def relation_lattice(lf: LocalFan) -> RelationBasis:
    """Z-basis of the lattice of linear relations among the rays.

    The overall sign is fixed so that the induced 3-form restricts to
    ``+dx ^ dy ^ dz`` on charts whose ordered rays have determinant +1.
    """
    rows = integer_kernel(lf.rays3)
    if len(rows) != lf.r - 3:
        raise NotSmooth("relation lattice has unexpected rank")
    # prefer a lexicographically positive leading entry, then fix orientation
    rows = [row if next(a for a in row if a) > 0 else [-a for a in row] for row in rows]
    k, k1, v = lf.maxcones[0]
    if _contract_coefficient(rows, (k, k1, v), lf.r) < 0:
        rows[0] = [-a for a in rows[0]]
    return RelationBasis(tuple(tuple(row) for row in rows))


def same_lattice(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    """True if the integer row spans of ``a`` and ``b`` coincide."""
    from sympy import Matrix

    ma, mb = Matrix(a), Matrix(b)
    if ma.rank() != mb.rank() or ma.rank() != len(a) or len(a) != len(b):
        return False
    # b = T a with T integral and unimodular
    sol = (ma * ma.T).inv() * ma * mb.T
    T = sol.T
    if any(x.q != 1 for x in T):
        return False
    return abs(T.det()) == 1 and T * ma == mb


@dataclass(frozen=True)
class ChartFrame:
    cone: tuple[int, int, int]
    order: tuple[int, int, int]

    def same_up_to_rotation(self, other: ChartFrame) -> bool:
        o = other.order
        return set(self.cone) == set(other.cone) and self.order in {o, o[1:] + o[:1], o[2:] + o[:2]}


def omega_coefficient(lf: LocalFan, order: Sequence[int], basis: RelationBasis | None = None) -> int:
    """Integer c with ``Omega|_chart = c dx ^ dy ^ dz`` for coordinates in ``order``."""
    basis = basis or relation_lattice(lf)
    return _contract_coefficient(basis.rows, tuple(order), lf.r)


def adapted_matrix(lf: LocalFan, cone: Sequence[int], basis: RelationBasis | None = None) -> list[list[int]]:
    """Columns of the relation basis at the rays outside ``cone``."""
    basis = basis or relation_lattice(lf)
    outside = [j for j in range(lf.r) if j not in cone]
    return [[row[j] for j in outside] for row in basis.rows]


def chart_frame(lf: LocalFan, cone: Sequence[int]) -> ChartFrame:
    """Order the chart coordinates so that Omega restricts to ``+dx ^ dy ^ dz``.

    Of the three valid cyclic rotations the one ending in the vertical ray is
    returned.
    """
    key = tuple(sorted(cone))
    match = [c for c in lf.maxcones if tuple(sorted(c)) == key]
    if not match:
        raise ValueError(f"{tuple(cone)} is not a maximal cone")
    base = match[0]
    basis = relation_lattice(lf)
    for order in permutations(base):
        if order[2] == lf.vertical and omega_coefficient(lf, order, basis) == 1:
            return ChartFrame(base, order)  # type: ignore[arg-type]
    raise NotSmooth(f"no orientation-compatible ordering for cone {base}")


def frame_rays(lf: LocalFan, frame: ChartFrame) -> Matrix3:
    return tuple(lf.rays3[i] for i in frame.order)  # type: ignore[return-value]


def self_intersection(fan: Fan2D, i: int) -> int:
    """The integer f with ``v_{i-1} + f v_i + v_{i+1} = 0``."""
    prev, cur, nxt = fan.ray(i - 1), fan.ray(i), fan.ray(i + 1)
    s = (prev[0] + nxt[0], prev[1] + nxt[1])
    k = 0 if cur[0] != 0 else 1
    if s[k] % cur[k] != 0:
        raise NoIntegerSolution(f"no integer self-intersection at ray {i}")
    f = -s[k] // cur[k]
    if (s[0] + f * cur[0], s[1] + f * cur[1]) != (0, 0):
        raise NoIntegerSolution(f"no integer self-intersection at ray {i}")
    return f


@dataclass(frozen=True)
class MonomialMap:
    """``x'_j = prod_k x_k^{E[j][k]}``."""

    exponents: Matrix3
    shared_ray: int | None = None
    f: int | None = None
    source: int | None = field(default=None, compare=False)
    target: int | None = field(default=None, compare=False)

    def det(self) -> int:
        return det3(self.exponents)

    def preserves_product(self) -> bool:
        return all(sum(self.exponents[j][k] for j in range(3)) == 1 for k in range(3))

    def compose(self, then: MonomialMap) -> MonomialMap:
        """Apply ``self`` first, then ``then``."""
        return MonomialMap(matmul3(then.exponents, self.exponents))

    def apply(self, exps: Sequence[int]) -> tuple[int, int, int]:
        """Exponent vector of ``x'^exps`` in the old coordinates."""
        return tuple(sum(exps[j] * self.exponents[j][k] for j in range(3)) for k in range(3))  # type: ignore[return-value]

    def to_json(self) -> dict[str, object]:
        return {
            "from": self.source,
            "to": self.target,
            "f": self.f,
            "exponents": [list(row) for row in self.exponents],
        }


def standard_transition(f: int) -> Matrix3:
    """Exponent matrix of ``(x', y', z') = (x^{-f} y, x^{-1}, x^{f+2} z)``."""
    return ((-f, 1, 0), (-1, 0, 0), (f + 2, 0, 1))


def transition(lf: LocalFan, sigma: int, sigma_prime: int) -> MonomialMap:
    """Monomial coordinate change between adjacent maximal cones (given by index)."""
    c1, c2 = lf.maxcones[sigma], lf.maxcones[sigma_prime]
    shared = set(c1) & set(c2)
    if sigma == sigma_prime or len(shared) != 2 or lf.vertical not in shared:
        raise NotAdjacent(f"cones {c1} and {c2} do not share a face through the vertical ray")
    (i,) = shared - {lf.vertical}
    U = frame_rays(lf, chart_frame(lf, c1))
    Up = frame_rays(lf, chart_frame(lf, c2))
    # x'_j = chi^{m'_j}, m'_j the dual basis of sigma'; E[j][k] = <m'_j, u_k>
    E = matmul3(transpose3(inverse3(Up)), transpose3(U))
    return MonomialMap(E, shared_ray=i, f=self_intersection(lf.base, i), source=sigma, target=sigma_prime)


def adjacent_pairs(lf: LocalFan) -> list[tuple[int, int]]:
    m = len(lf.maxcones)
    pairs = []
    for a in range(m):
        for b in range(m):
            if a != b and len(set(lf.maxcones[a]) & set(lf.maxcones[b])) == 2:
                pairs.append((a, b))
    return pairs


def atlas_report(fan: Fan2D) -> dict[str, object]:
    lf = lift_local(fan)
    basis = relation_lattice(lf)
    frames = [chart_frame(lf, c) for c in lf.maxcones]
    return {
        "rays2d": [list(v) for v in fan.rays],
        "rays3": [list(v) for v in lf.rays3],
        "relations": [list(row) for row in basis.rows],
        "self_intersections": [self_intersection(fan, i) for i in range(len(fan))],
        "charts": [
            {"cone": list(fr.cone), "order": list(fr.order), "omega": omega_coefficient(lf, fr.order, basis)}
            for fr in frames
        ],
        "transitions": [transition(lf, a, b).to_json() for a, b in adjacent_pairs(lf)],
    }
