"""Weighted-digraph model of a metastable continuous-time Markov chain.

A chain is a finite digraph whose arcs carry exact rational exponents
(``weight``) and, optionally, positive float prefactors (``kappa``).  The
jump rate along an arc is ``kappa * exp(-weight / epsilon)``; an absent arc
stands for an infinite exponent, i.e. a forbidden transition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

State = Union[int, str]

__all__ = [
    "Arc",
    "ChainGraph",
    "ClosedClasses",
    "GeneratorMatrix",
    "GraphError",
    "ValidationFailure",
    "ValidationReport",
    "SymmetryError",
    "EnumerationCapError",
    "InternalInvariantError",
    "chain_graph",
    "closed_communicating_classes",
    "generator_matrix",
    "min_arcs",
    "state_key",
    "strongly_connected_components",
    "validate",
]


class GraphError(ValueError):
    """Structural violation in a chain graph (bad arc, bad weight, ...)."""


class ValidationFailure(ValueError):
    """The graph violates a standing assumption required by the caller."""


class SymmetryError(ValueError):
    """The operation needs a symmetry-free run, but ties were detected."""


class EnumerationCapError(ValueError):
    """Brute-force enumeration refused: the state count exceeds the cap."""


class InternalInvariantError(AssertionError):
    """A provable invariant failed.  This is a bug, not a user error."""


def state_key(s: State):
    """Deterministic total order over state ids; ints sort before strings."""
    if isinstance(s, bool):
        raise GraphError(f"invalid state id {s!r}")
    if isinstance(s, int):
        return (0, s, "")
    return (1, 0, str(s))


def _as_weight(value, where: str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"unparseable weight {value!r} for {where}") from exc
    if isinstance(value, float):
        raise GraphError(
            f"float weight {value!r} for {where}; pass a Fraction, an int or a "
            "decimal/rational string so exactness is preserved"
        )
    raise GraphError(f"unsupported weight type {type(value).__name__} for {where}")


@dataclass(frozen=True)
class Arc:
    """Directed arc with exact exponent and optional positive prefactor."""

    tail: State
    head: State
    weight: Fraction
    kappa: float | None = None

    def pair(self) -> tuple[State, State]:
        return (self.tail, self.head)


@dataclass(frozen=True)
class ChainGraph:
    states: tuple[State, ...]
    arcs: tuple[Arc, ...]

    def __post_init__(self):
        if not self.states:
            raise GraphError("a chain graph needs at least one state")
        seen: set[State] = set()
        for s in self.states:
            state_key(s)
            if s in seen:
                raise GraphError(f"duplicate state {s!r}")
            seen.add(s)
        pairs: set[tuple[State, State]] = set()
        prefactor_mode: bool | None = None
        for a in self.arcs:
            where = f"arc {a.tail!r}->{a.head!r}"
            if a.tail not in seen or a.head not in seen:
                raise GraphError(f"{where} references an unknown state")
            if a.tail == a.head:
                raise GraphError(f"{where} is a self-loop")
            if a.pair() in pairs:
                raise GraphError(f"{where} appears more than once")
            pairs.add(a.pair())
            if not isinstance(a.weight, Fraction):
                raise GraphError(f"{where} has non-Fraction weight {a.weight!r}")
            if a.weight <= 0:
                raise GraphError(f"{where} has nonpositive weight {a.weight}")
            has_k = a.kappa is not None
            if has_k and not (isinstance(a.kappa, (int, float)) and a.kappa > 0):
                raise GraphError(f"{where} has nonpositive prefactor {a.kappa!r}")
            if prefactor_mode is None:
                prefactor_mode = has_k
            elif prefactor_mode != has_k:
                raise GraphError(
                    f"{where} mixes prefactor modes: prefactors are all-or-none"
                )

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def has_prefactors(self) -> bool:
        return bool(self.arcs) and self.arcs[0].kappa is not None

    @cached_property
    def arc_map(self) -> dict[tuple[State, State], Arc]:
        return {a.pair(): a for a in self.arcs}

    @cached_property
    def _out(self) -> dict[State, tuple[Arc, ...]]:
        out: dict[State, list[Arc]] = {s: [] for s in self.states}
        for a in self.arcs:
            out[a.tail].append(a)
        return {s: tuple(arcs) for s, arcs in out.items()}

    def out_arcs(self, s: State) -> tuple[Arc, ...]:
        return self._out[s]

    def adjacency(self) -> dict[State, list[State]]:
        return {s: [a.head for a in self._out[s]] for s in self.states}


def chain_graph(arcs: Iterable[Sequence], states: Iterable[State] | None = None) -> ChainGraph:
    """Build a ChainGraph from ``(tail, head, weight[, kappa])`` tuples.

    Weights may be ints, Fractions or rational/decimal strings.  When
    ``states`` is omitted the state set is collected from the arcs and
    sorted deterministically.
    """
    built: list[Arc] = []
    for item in arcs:
        if len(item) == 3:
            t, h, w = item
            kappa = None
        elif len(item) == 4:
            t, h, w, kappa = item
            kappa = float(kappa)
        else:
            raise GraphError(f"arc tuple {item!r} must have 3 or 4 entries")
        built.append(Arc(t, h, _as_weight(w, f"arc {t!r}->{h!r}"), kappa))
    if states is None:
        seen: set[State] = set()
        for a in built:
            seen.add(a.tail)
            seen.add(a.head)
        states = sorted(seen, key=state_key)
    return ChainGraph(tuple(states), tuple(built))


def _normalize(
    g: "ChainGraph | Mapping[State, Iterable[State]]",
    vertices: Iterable[State] | None = None,
) -> tuple[list[State], dict[State, list[State]]]:
    if isinstance(g, ChainGraph):
        return list(g.states), g.adjacency()
    adj = {v: list(heads) for v, heads in g.items()}
    if vertices is None:
        verts: list[State] = list(adj)
        known = set(verts)
        for heads in adj.values():
            for h in heads:
                if h not in known:
                    known.add(h)
                    verts.append(h)
    else:
        verts = list(vertices)
    for v in verts:
        adj.setdefault(v, [])
    return verts, adj


def strongly_connected_components(
    g: "ChainGraph | Mapping[State, Iterable[State]]",
    vertices: Iterable[State] | None = None,
) -> list[frozenset]:
    """Tarjan's algorithm, iterative so deep graphs cannot overflow the stack.

    Components come out in reverse topological order of the condensation.
    """
    verts, adj = _normalize(g, vertices)
    index: dict[State, int] = {}
    lowlink: dict[State, int] = {}
    on_stack: set[State] = set()
    stack: list[State] = []
    components: list[frozenset] = []
    counter = 0

    for root in verts:
        if root in index:
            continue
        # Explicit DFS state machine: (vertex, iterator over successors).
        work = [(root, iter(adj[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(frozenset(comp))
    return components


class ClosedClasses(NamedTuple):
    nontrivial: tuple[frozenset, ...]
    absorbing: tuple[State, ...]


def closed_communicating_classes(
    g: "ChainGraph | Mapping[State, Iterable[State]]",
    vertices: Iterable[State] | None = None,
) -> ClosedClasses:
    """Closed communicating classes of a digraph.

    Returns the nontrivial classes (mutually reachable sets of two or more
    vertices with no arc leaving the set) and, separately, the absorbing
    vertices (single vertices without outgoing arcs).
    """
    verts, adj = _normalize(g, vertices)
    nontrivial: list[frozenset] = []
    absorbing: list[State] = []
    for comp in strongly_connected_components(adj, verts):
        closed = all(h in comp for v in comp for h in adj[v])
        if not closed:
            continue
        if len(comp) >= 2:
            nontrivial.append(comp)
        else:
            absorbing.append(next(iter(comp)))
    nontrivial.sort(key=lambda c: sorted(map(state_key, c)))
    absorbing.sort(key=state_key)
    return ClosedClasses(tuple(nontrivial), tuple(absorbing))


@dataclass(frozen=True)
class ValidationReport:
    n: int
    scc_partition: tuple[frozenset, ...]
    closed_classes: tuple[frozenset, ...]
    is_irreducible: bool
    satisfies_a2: bool

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "validation-report",
            "n": self.n,
            "scc_partition": [sorted(map(str, c)) for c in self.scc_partition],
            "closed_classes": [sorted(map(str, c)) for c in self.closed_classes],
            "is_irreducible": self.is_irreducible,
            "satisfies_a2": self.satisfies_a2,
        }


def validate(g: ChainGraph) -> ValidationReport:
    """Semantic validation: SCC partition, closed classes, key assumptions.

    ``satisfies_a2`` means the chain has exactly one closed communicating
    class (counting an absorbing state as a trivial closed class), which is
    what the timescale algorithms require of their input.
    """
    sccs = strongly_connected_components(g)
    adj = g.adjacency()
    closed = [c for c in sccs if all(h in c for v in c for h in adj[v])]
    closed.sort(key=lambda c: sorted(map(state_key, c)))
    return ValidationReport(
        n=g.n,
        scc_partition=tuple(sccs),
        closed_classes=tuple(closed),
        is_irreducible=len(sccs) == 1,
        satisfies_a2=len(closed) == 1,
    )


def min_arcs(g: ChainGraph, s: State) -> tuple[Fraction, tuple[Arc, ...]]:
    """Exact minimum outgoing weight of ``s`` and every arc attaining it."""
    arcs = g.out_arcs(s)
    if not arcs:
        raise GraphError(f"state {s!r} has no outgoing arcs")
    w = min(a.weight for a in arcs)
    attaining = tuple(
        sorted((a for a in arcs if a.weight == w), key=lambda a: state_key(a.head))
    )
    return w, attaining


@dataclass(frozen=True)
class GeneratorMatrix:
    states: tuple[State, ...]
    epsilon: float
    matrix: np.ndarray
    order_one_only: bool = False

    @property
    def index(self) -> dict[State, int]:
        return {s: i for i, s in enumerate(self.states)}

    def norm(self) -> float:
        return float(np.max(np.abs(self.matrix)))


def generator_matrix(g: ChainGraph, epsilon: float) -> GeneratorMatrix:
    """Dense generator ``L`` with ``L_ij = kappa_ij * exp(-U_ij/epsilon)``.

    Rows sum to zero by construction.  If the graph carries no prefactors
    they default to 1 and the result is flagged ``order_one_only``: its
    entries are correct to exponential order only.
    """
    if not (isinstance(epsilon, (int, float)) and epsilon > 0):
        raise ValueError(f"epsilon must be a positive real, got {epsilon!r}")
    idx = {s: i for i, s in enumerate(g.states)}
    n = g.n
    L = np.zeros((n, n), dtype=float)
    for a in g.arcs:
        kappa = 1.0 if a.kappa is None else a.kappa
        L[idx[a.tail], idx[a.head]] = kappa * float(np.exp(-float(a.weight) / epsilon))
    np.fill_diagonal(L, 0.0)
    np.fill_diagonal(L, -L.sum(axis=1))
    return GeneratorMatrix(
        states=g.states,
        epsilon=float(epsilon),
        matrix=L,
        order_one_only=not g.has_prefactors,
    )
