"""Benchmark functions, instance generators and the graph file format.

Every problem object counts its evaluations.  ``value(x)`` is the raw,
uncounted function; ``evaluate(x)`` is what search loops call.

OneMax, LeadingOnes, Plateau and Jump are additionally described by an
*agreement vector* ``a_i = [x_{s(i)} == z_{s(i)}]`` (``s`` the LeadingOnes
permutation, identity otherwise).  The fitness depends on ``a`` alone, which
is what lets the compiled kernels evaluate offspring incrementally.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from .rng import RandomSource

# kernel problem codes, mirrored in _ckernels.pyx
KIND_ONEMAX = 0
KIND_LEADINGONES = 1
KIND_PLATEAU = 2
KIND_JUMP = 3


def _bits(x, n=None):
    x = np.asarray(x, dtype=np.uint8)
    if n is not None and x.size != n:
        raise ValueError(f"length mismatch: expected {n}, got {x.size}")
    return x


# -- plain evaluation functions ---------------------------------------------

def eval_onemax(x, z=None) -> int:
    x = _bits(x)
    if z is None:
        return int(np.count_nonzero(x))
    z = _bits(z)
    if x.shape != z.shape:
        raise ValueError("length mismatch")
    return int(np.count_nonzero(x == z))


@dataclass
class LOInstance:
    z: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.z = _bits(self.z)
        self.sigma = np.asarray(self.sigma, dtype=np.int64)
        if self.z.size != self.sigma.size:
            raise ValueError("z and sigma differ in length")
        if not np.array_equal(np.sort(self.sigma), np.arange(self.sigma.size)):
            raise ValueError("sigma is not a permutation")

    @classmethod
    def standard(cls, n):
        return cls(np.ones(n, np.uint8), np.arange(n))

    @property
    def n(self):
        return self.z.size


def eval_leadingones(x, inst: LOInstance) -> int:
    x = _bits(x, inst.n)
    agree = x[inst.sigma] == inst.z[inst.sigma]
    if agree.all():
        return inst.n
    return int(np.argmin(agree))


def eval_jump(x, k: int, z=None) -> int:
    x = _bits(x)
    n = x.size
    if not 1 <= k <= n:
        raise ValueError(f"jump gap k={k} outside [1, {n}]")
    om = eval_onemax(x, z)
    if om <= n - k or om == n:
        return k + om
    return n - om


def eval_plateau(x, k: int, z=None) -> int:
    x = _bits(x)
    n = x.size
    if not 2 <= k <= n:
        raise ValueError(f"plateau width k={k} outside [2, {n}]")
    om = eval_onemax(x, z)
    if om <= n - k or om == n:
        return om
    return n - k


def eval_linear(x, w) -> float:
    x = _bits(x)
    w = np.asarray(w, dtype=float)
    if x.shape != w.shape:
        raise ValueError("length mismatch")
    return float(np.dot(w, x))


def eval_rvalued_onemax(x, z, mode: int, r: int) -> int:
    """Distance of x to z (minimized): mismatches, L1 or ring L1."""
    x = np.asarray(x, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64)
    if x.shape != z.shape:
        raise ValueError("length mismatch")
    if mode == 1:
        return int(np.count_nonzero(x != z))
    d = np.abs(x - z)
    if mode == 2:
        return int(d.sum())
    if mode == 3:
        return int(np.minimum(d, r - d).sum())
    raise ValueError(f"mode must be 1, 2 or 3, got {mode}")


# -- graphs -----------------------------------------------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.count = n

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        self.count -= 1
        return True


@dataclass
class GraphInstance:
    """Undirected weighted graph; vertices 0..n_vertices-1 internally."""
    n_vertices: int
    edges: np.ndarray           # shape (m, 3): u, v, w
    w_max: int = 0

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 3)
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        if self.edges.size:
            if self.edges[:, :2].min() < 0 or self.edges[:, :2].max() >= self.n_vertices:
                raise ValueError("edge endpoint out of range")
            if self.edges[:, 2].min() < 1:
                raise ValueError("edge weights must be integers >= 1")
        self._pairs = [(int(u), int(v)) for u, v, _ in self.edges.tolist()]
        top = int(self.edges[:, 2].max()) if self.edges.size else 1
        self.w_max = max(int(self.w_max), top)
        if self.components(np.ones(self.m, np.uint8)) != 1:
            raise ValueError("graph is not connected")

    @property
    def m(self):
        return self.edges.shape[0]

    @property
    def weights(self):
        return self.edges[:, 2]

    def components(self, x) -> int:
        uf = _UnionFind(self.n_vertices)
        for (u, v), bit in zip(self._pairs, np.asarray(x).tolist()):
            if bit:
                uf.union(u, v)
        return uf.count


def eval_mst(x, g: GraphInstance) -> int:
    x = _bits(x, g.m)
    big = g.n_vertices ** 2 * g.w_max
    comps = g.components(x)
    size = int(x.sum())
    weight = int(g.weights[x.astype(bool)].sum())
    return big * big * (comps - 1) + big * (size - (g.n_vertices - 1)) + weight


def epsilon_separated_weights(t: int, eps: float = 1.0) -> list[tuple[int, int, int]]:
    """Triangle weights (light, light, heavy) whose distinct values differ
    by a factor of at least 1 + eps."""
    values = [1]
    for _ in range(2 * t - 1):
        values.append(int(np.ceil((1 + eps) * values[-1])))
    return [(values[2 * i], values[2 * i], values[2 * i + 1]) for i in range(t)]


def gen_connected_triangles(t: int, weights=(1, 1, 2), rng: RandomSource | None = None,
                            shuffle: bool = False) -> GraphInstance:
    """Chain of t triangles sharing single vertices.

    Triangle i spans vertices 2i, 2i+1, 2i+2 with light edges (2i, 2i+1),
    (2i+1, 2i+2) and the heavy edge (2i, 2i+2).  ``weights`` is either one
    (light, light, heavy) triple for all triangles or a list of t triples.
    With ``shuffle`` the edge order is permuted using ``rng``.
    """
    if t < 1:
        raise ValueError("need at least one triangle")
    if len(weights) == 3 and np.isscalar(weights[0]):
        weights = [tuple(weights)] * t
    if len(weights) != t:
        raise ValueError("need one weight triple per triangle")
    edges = []
    for i, (a, b, h) in enumerate(weights):
        v = 2 * i
        edges += [(v, v + 1, a), (v + 1, v + 2, b), (v, v + 2, h)]
    edges = np.array(edges, dtype=np.int64)
    if shuffle:
        if rng is None:
            raise ValueError("shuffling needs a random source")
        edges = edges[rng.permutation(len(edges))]
    return GraphInstance(2 * t + 1, edges)


def format_graph(g: GraphInstance) -> str:
    lines = [f"{g.n_vertices} {g.m} {g.w_max}"]
    lines += [f"{u + 1} {v + 1} {w}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> GraphInstance:
    rows = [ln.split() for ln in io.StringIO(text) if ln.strip()]
    if not rows or len(rows[0]) != 3:
        raise ValueError("graph header must read 'nv m wmax'")
    nv, m, wmax = (int(v) for v in rows[0])
    if len(rows) - 1 != m:
        raise ValueError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = []
    for row in rows[1:]:
        if len(row) != 3:
            raise ValueError(f"bad edge line: {' '.join(row)}")
        u, v, w = (int(s) for s in row)
        edges.append((u - 1, v - 1, w))
    g = GraphInstance(nv, np.array(edges, dtype=np.int64).reshape(-1, 3), wmax)
    if g.w_max != wmax:
        raise ValueError("an edge weight exceeds wmax")
    return g


def read_graph(path) -> GraphInstance:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read())


def write_graph(g: GraphInstance, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_graph(g))


# -- instance generators ------------------------------------------------------

def gen_random_lo_instance(n: int, rng: RandomSource) -> LOInstance:
    if n < 1:
        raise ValueError("n must be positive")
    z = rng.bits(n)
    return LOInstance(z, rng.permutation(n))


def gen_random_linear_weights(n: int, low: float, high: float, rng: RandomSource) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    if not low < high:
        raise ValueError("need low < high")
    return low + (high - low) * rng.generator.random(n)


# -- problem objects ----------------------------------------------------------

class Problem:
    """Evaluation function with a dimension, a direction and a counter."""

    name = "problem"
    maximize = True
    alphabet = 2

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = int(n)
        self.evaluations = 0

    def value(self, x):
        raise NotImplementedError

    def evaluate(self, x):
        self.evaluations += 1
        return self.value(x)

    def values(self, rows) -> np.ndarray:
        """Uncounted values of every row of a 2-d genotype array."""
        return np.array([self.value(x) for x in rows])

    @property
    def optimum_value(self):
        raise NotImplementedError

    def optimizer(self):
        """A known optimal genotype, or None."""
        return None

    def random_genotype(self, rng: RandomSource) -> np.ndarray:
        return rng.bits(self.n)

    def sign(self) -> int:
        return 1 if self.maximize else -1

    def kernel(self):
        """(kind, parameter) for agreement-vector kernels, or None."""
        return None

    def describe(self) -> str:
        return self.name


class _AgreementProblem(Problem):
    """Functions of the agreement vector between x and a target z."""

    def __init__(self, n, z=None):
        super().__init__(n)
        self.z = np.ones(n, np.uint8) if z is None else _bits(z, n)

    def order(self):
        return None

    def agreement(self, x) -> np.ndarray:
        x = _bits(x, self.n)
        a = (x == self.z).astype(np.uint8)
        order = self.order()
        return a if order is None else a[order]

    def from_agreement(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.uint8)
        order = self.order()
        if order is not None:
            inv = np.empty_like(a)
            inv[order] = a
            a = inv
        return np.where(a == 1, self.z, 1 - self.z).astype(np.uint8)

    def optimizer(self):
        return self.z.copy()

    def distance(self, x) -> int:
        return int(np.count_nonzero(_bits(x, self.n) != self.z))


class OneMax(_AgreementProblem):
    name = "onemax"

    def value(self, x):
        return eval_onemax(x, self.z)

    def values(self, rows):
        return np.count_nonzero(np.asarray(rows) == self.z, axis=1)

    @property
    def optimum_value(self):
        return self.n

    def kernel(self):
        return KIND_ONEMAX, 0


class LeadingOnes(_AgreementProblem):
    name = "leadingones"

    def __init__(self, n, z=None, sigma=None):
        super().__init__(n, z)
        sigma = np.arange(n) if sigma is None else sigma
        self.instance = LOInstance(self.z, sigma)

    @classmethod
    def from_instance(cls, inst: LOInstance):
        return cls(inst.n, inst.z, inst.sigma)

    def order(self):
        return self.instance.sigma

    def value(self, x):
        return eval_leadingones(x, self.instance)

    @property
    def optimum_value(self):
        return self.n

    def kernel(self):
        return KIND_LEADINGONES, 0


class Jump(_AgreementProblem):
    name = "jump"

    def __init__(self, n, k, z=None):
        super().__init__(n, z)
        if not 1 <= k <= n:
            raise ValueError(f"jump gap k={k} outside [1, {n}]")
        self.k = int(k)

    def value(self, x):
        return eval_jump(x, self.k, self.z)

    @property
    def optimum_value(self):
        return self.n + self.k

    def kernel(self):
        return KIND_JUMP, self.k

    def describe(self):
        return f"jump{self.k}"


class Plateau(_AgreementProblem):
    name = "plateau"

    def __init__(self, n, k, z=None):
        super().__init__(n, z)
        if not 2 <= k <= n:
            raise ValueError(f"plateau width k={k} outside [2, {n}]")
        self.k = int(k)

    def value(self, x):
        return eval_plateau(x, self.k, self.z)

    @property
    def optimum_value(self):
        return self.n

    def kernel(self):
        return KIND_PLATEAU, self.k

    def describe(self):
        return f"plateau{self.k}"


class Linear(Problem):
    name = "linear"

    def __init__(self, w):
        w = np.asarray(w, dtype=float)
        super().__init__(w.size)
        self.w = w

    def value(self, x):
        return eval_linear(x, self.w)

    @property
    def optimum_value(self):
        return float(np.clip(self.w, 0, None).sum())

    def optimizer(self):
        return (self.w > 0).astype(np.uint8)


class RValuedOneMax(Problem):
    """Distance to z over [0..r-1]^n, minimized."""

    name = "rvalued-onemax"
    maximize = False

    def __init__(self, z, r: int, mode: int):
        z = np.asarray(z, dtype=np.int64)
        super().__init__(z.size)
        if r < 2:
            raise ValueError("alphabet size must be at least 2")
        if mode not in (1, 2, 3):
            raise ValueError(f"mode must be 1, 2 or 3, got {mode}")
        if z.min() < 0 or z.max() >= r:
            raise ValueError("target entries outside [0, r-1]")
        self.z, self.r, self.mode = z, int(r), int(mode)
        self.alphabet = self.r

    def value(self, x):
        return eval_rvalued_onemax(x, self.z, self.mode, self.r)

    @property
    def optimum_value(self):
        return 0

    def optimizer(self):
        return self.z.copy()

    def random_genotype(self, rng):
        return np.array([rng.integer(self.r) for _ in range(self.n)], dtype=np.int64)

    def describe(self):
        return f"rvalued-onemax{self.mode}"


class MinimumSpanningTree(Problem):
    """Edge-subset encoding with penalties for extra edges and components."""

    name = "mst"
    maximize = False

    def __init__(self, graph: GraphInstance):
        super().__init__(graph.m)
        self.graph = graph
        self._opt = None

    def value(self, x):
        return eval_mst(x, self.graph)

    @property
    def optimum_value(self):
        if self._opt is None:
            from .oracles import kruskal_reference
            self._opt = int(kruskal_reference(self.graph).value)
        return self._opt


class ConnectedEdgeWeight(Problem):
    """Selected edge weight plus a large penalty per extra component.

    Unlike ``MinimumSpanningTree`` an extra edge costs only its weight, so
    single-edge moves can exchange tree edges by passing through a cycle.
    """

    name = "connected-weight"
    maximize = False

    def __init__(self, graph: GraphInstance):
        super().__init__(graph.m)
        self.graph = graph
        self.penalty = graph.n_vertices * graph.m * graph.w_max
        self._opt = None

    def value(self, x):
        x = _bits(x, self.graph.m)
        weight = int(self.graph.weights[x.astype(bool)].sum())
        return self.penalty * (self.graph.components(x) - 1) + weight

    @property
    def optimum_value(self):
        if self._opt is None:
            from .oracles import kruskal_reference
            self._opt = int(kruskal_reference(self.graph).value)
        return self._opt


class Negated(Problem):
    """Maximizing view of a minimization problem; counts on the inner problem."""

    def __init__(self, inner: Problem):
        self.inner = inner
        self.n = inner.n
        self.alphabet = inner.alphabet
        self.maximize = not inner.maximize
        self.name = inner.name

    @property
    def evaluations(self):
        return self.inner.evaluations

    @evaluations.setter
    def evaluations(self, value):
        self.inner.evaluations = value

    def value(self, x):
        return -self.inner.value(x)

    @property
    def optimum_value(self):
        return -self.inner.optimum_value

    def optimizer(self):
        return self.inner.optimizer()

    def random_genotype(self, rng):
        return self.inner.random_genotype(rng)

    def describe(self):
        return self.inner.describe()
