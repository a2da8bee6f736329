"""Tie-tolerant sweep: release whole min-arc sets, contract closed classes.

Where the single-arc sweep breaks weight ties one arc at a time, this
variant releases every arc attaining the bucket minimum at once and then
contracts every nontrivial closed communicating class of the current
transition graph simultaneously.  It therefore needs no tie-breaking and is
the reference behaviour for graphs with weight symmetries.  Prefactors, if
present, are carried through unmodified and flagged as ignored: the class
update rule only preserves exponents.

``compare_alg1_alg2`` checks the four consistency statements tying the two
sweeps together; the command-line ``compare`` subcommand turns a violation
into exit code 2 because it can only mean an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .alg1 import Alg1Report, Bucket, TGraph, _hierarchy, run_algorithm1
from .chain import (
    Arc,
    ChainGraph,
    GraphError,
    InternalInvariantError,
    State,
    ValidationFailure,
    closed_communicating_classes,
    state_key,
    validate,
)
from .contraction import WorkingGraph, super_vertex_name
from .graphio import format_rational
from .stopping import StopCriterion

__all__ = [
    "ClassRecord",
    "Alg2Report",
    "ComparisonReport",
    "update_outgoing_class",
    "run_algorithm2",
    "class_hierarchy",
    "compare_alg1_alg2",
]


def _jstate(s: State):
    return s if isinstance(s, int) else str(s)


@dataclass(frozen=True)
class ClassRecord:
    index: int
    step: int
    birth: Fraction
    member_vids: tuple
    member_states: frozenset
    super_vid: str
    exit_weight: Optional[Fraction]

    # class_hierarchy reuses the cycle-forest builder, which looks these up
    @property
    def contracted(self) -> bool:
        return True

    @property
    def main_state(self) -> State:
        return min(self.member_states, key=state_key)

    @property
    def exit_pair(self):
        return None


@dataclass(frozen=True)
class Alg2Report:
    graph: ChainGraph
    theta: tuple
    multiplicity: tuple
    transfers_by_step: tuple
    tgraphs: tuple
    classes: tuple
    final_closed_classes: tuple
    final_absorbing: tuple
    transient_states: tuple
    covering_class: Optional[frozenset]
    stop_reason: str
    prefactors_ignored: bool

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def P(self) -> int:
        return len(self.theta)

    def gamma_multiset(self) -> tuple:
        """The exponent multiset reconstructed as theta_p repeated m(p) times."""
        out = []
        for w, mult in zip(self.theta, self.multiplicity):
            out.extend([w] * mult)
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "alg2-report",
            "n": self.n,
            "stop_reason": self.stop_reason,
            "P": self.P,
            "theta": [format_rational(w) for w in self.theta],
            "theta_float": [float(w) for w in self.theta],
            "multiplicity": list(self.multiplicity),
            "prefactors_ignored": self.prefactors_ignored,
            "classes": [
                {
                    "index": rec.index,
                    "step": rec.step,
                    "birth": format_rational(rec.birth),
                    "members": sorted((_jstate(s) for s in rec.member_states), key=str),
                    "exit": None
                    if rec.exit_weight is None
                    else format_rational(rec.exit_weight),
                }
                for rec in self.classes
            ],
            "final_closed_classes": [
                sorted((_jstate(s) for s in c), key=str)
                for c in self.final_closed_classes
            ],
            "final_absorbing": [_jstate(s) for s in self.final_absorbing],
            "transient_states": [_jstate(s) for s in self.transient_states],
            "covering_class": None
            if self.covering_class is None
            else sorted((_jstate(s) for s in self.covering_class), key=str),
            "tgraphs": [t.to_json_dict() for t in self.tgraphs],
            "contraction_tree": [n.to_json_dict() for n in class_hierarchy(self)],
        }


def class_hierarchy(report: Alg2Report) -> tuple:
    """Rooted forest of contracted closed classes; leaves are states."""
    return _hierarchy(report.graph.states, report.classes)


def update_outgoing_class(
    wg: WorkingGraph,
    class_vids: Iterable[State],
    theta: Fraction,
    u_min: Mapping,
) -> dict:
    """Reweighted outgoing arc set for the super-vertex replacing a class.

    Every exit arc (i inside -> j outside) gets weight
    U_ij - U_min(i) + theta; prefactors pass through untouched.
    """
    exit_arcs, _intra = wg.split_outgoing(class_vids)
    updated = {}
    for pair, a in exit_arcs.items():
        tail_vid = wg.vertex_of[a.tail]
        w = a.weight - u_min[tail_vid] + theta
        updated[pair] = Arc(a.tail, a.head, w, a.kappa)
    return updated


def _insert_min_set(wg: WorkingGraph, bucket: Bucket, vid, u_min: dict) -> None:
    arcs = wg.out[vid]
    if not arcs:
        return
    w = min(a.weight for a in arcs.values())
    u_min[vid] = w
    for a in arcs.values():
        if a.weight == w:
            bucket.insert(a)


def run_algorithm2(
    g: ChainGraph,
    stop: Optional[StopCriterion] = None,
    _class_order=None,
) -> Alg2Report:
    """Run the simultaneous-release sweep to the chosen stop criterion.

    ``_class_order`` is a test hook: it receives the list of closed classes
    detected in one step and returns them in the order to contract.  The
    result is provably order-independent; the hook exists to verify that.
    """
    if stop is None:
        stop = StopCriterion.bucket_empty()
    if stop.kind not in ("bucket-empty", "exponent-threshold", "class-covering", "custom"):
        raise ValueError(f"stop criterion {stop.kind!r} does not apply to this sweep")
    vreport = validate(g)
    if not vreport.satisfies_a2:
        raise ValidationFailure(
            "the sweep needs exactly one closed communicating class, found "
            f"{len(vreport.closed_classes)}: "
            + ", ".join(super_vertex_name(c) for c in vreport.closed_classes)
        )

    wg = WorkingGraph(g)
    bucket = Bucket()
    u_min: dict = {}
    for v in sorted(wg.vertices, key=state_key):
        _insert_min_set(wg, bucket, v, u_min)

    theta: list = []
    multiplicity: list = []
    transfers_by_step: list = []
    released_all: list = []
    classes: list = []
    covering: Optional[frozenset] = None
    stop_reason = "bucket-empty"
    p = 0

    def current_closed_classes():
        adj: dict = {v: set() for v in wg.vertices}
        for a in released_all:
            tv = wg.vertex_of[a.tail]
            hv = wg.vertex_of[a.head]
            if tv != hv:
                adj[tv].add(hv)
        return closed_communicating_classes(
            {v: sorted(heads, key=state_key) for v, heads in adj.items()},
            vertices=sorted(wg.vertices, key=state_key),
        )

    while len(bucket):
        if stop.kind == "exponent-threshold" and bucket.peek_min_weight() >= stop.threshold:
            stop_reason = "exponent-threshold"
            break
        w, released = bucket.extract_all_min()
        p += 1
        theta.append(w)
        transfers_by_step.append(tuple(released))
        released_all.extend(released)
        tails = {wg.vertex_of[a.tail] for a in released}
        multiplicity.append(len(tails))
        for a in released:
            wg.remove_arc(a)

        cc = current_closed_classes()
        expanded = [
            frozenset().union(*(wg.members[v] for v in c)) for c in cc.nontrivial
        ] + [wg.members[v] for v in cc.absorbing]
        if stop.kind == "class-covering":
            hit = stop.covering_class(expanded)
            if hit is not None:
                covering = hit
                stop_reason = "class-covering"
                break
        if stop.kind == "custom":
            current = TGraph(g.states, tuple(released_all), w)
            if stop.predicate(current, w):
                stop_reason = "custom"
                break
        if len(cc.nontrivial) == 1 and not cc.absorbing and set(cc.nontrivial[0]) == wg.vertices:
            stop_reason = "full-closure"
            break

        to_contract = list(cc.nontrivial)
        if _class_order is not None:
            to_contract = [frozenset(c) for c in _class_order(to_contract)]
            if set(to_contract) != set(cc.nontrivial):
                raise ValueError("_class_order must permute the detected classes")
        for cls in to_contract:
            members = frozenset().union(*(wg.members[v] for v in cls))
            updated = update_outgoing_class(wg, cls, w, u_min)
            super_vid = wg.contract(cls, updated)
            exit_w = min((a.weight for a in updated.values()), default=None)
            _insert_min_set(wg, bucket, super_vid, u_min)
            classes.append(
                ClassRecord(
                    index=len(classes) + 1,
                    step=p,
                    birth=w,
                    member_vids=tuple(sorted(cls, key=state_key)),
                    member_states=members,
                    super_vid=super_vid,
                    exit_weight=exit_w,
                )
            )

    tgraphs = [TGraph(g.states, (), Fraction(0))]
    upto = 0
    for i in range(p):
        upto += len(transfers_by_step[i])
        tgraphs.append(TGraph(g.states, tuple(released_all[:upto]), theta[i]))

    final_cc = closed_communicating_classes(
        _expanded_adjacency(released_all), vertices=g.states
    )
    in_closed = set().union(*final_cc.nontrivial) if final_cc.nontrivial else set()
    in_closed |= set(final_cc.absorbing)
    transient = tuple(s for s in sorted(g.states, key=state_key) if s not in in_closed)

    return Alg2Report(
        graph=g,
        theta=tuple(theta),
        multiplicity=tuple(multiplicity),
        transfers_by_step=tuple(transfers_by_step),
        tgraphs=tuple(tgraphs),
        classes=tuple(classes),
        final_closed_classes=final_cc.nontrivial,
        final_absorbing=final_cc.absorbing,
        transient_states=transient,
        covering_class=covering,
        stop_reason=stop_reason,
        prefactors_ignored=g.has_prefactors,
    )


def _expanded_adjacency(arcs: Iterable[Arc]) -> dict:
    adj: dict = {}
    for a in arcs:
        adj.setdefault(a.tail, []).append(a.head)
    return adj


@dataclass(frozen=True)
class StatementResult:
    number: int
    ok: bool
    detail: str


@dataclass(frozen=True)
class ComparisonReport:
    graph: ChainGraph
    statements: tuple
    k_index: tuple
    alg1_gamma: tuple
    alg2_theta: tuple

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.statements)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "comparison-report",
            "ok": self.ok,
            "statements": [
                {"number": s.number, "ok": s.ok, "detail": s.detail}
                for s in self.statements
            ],
            "k_index": list(self.k_index),
            "gamma": [format_rational(w) for w in self.alg1_gamma],
            "theta": [format_rational(w) for w in self.alg2_theta],
        }


def compare_alg1_alg2(
    g: ChainGraph,
    tie_break: str = "lex",
    r1: Optional[Alg1Report] = None,
    r2: Optional[Alg2Report] = None,
) -> ComparisonReport:
    """Cross-check both sweeps on complete runs of the same graph.

    The four statements verified:
      1. the distinct exponent values coincide;
      2. each partial arc set of the single-arc sweep, expanded, is
         contained in the matching arc set of the simultaneous sweep;
      3. nontrivial closed classes of the expanded graphs coincide at the
         matching indices K_p;
      4. so do the absorbing vertices.
    """
    if r1 is None:
        r1 = run_algorithm1(g, tie_break=tie_break)
    if r2 is None:
        r2 = run_algorithm2(g)
    if r1.stop_reason != "bucket-empty" or r2.stop_reason not in ("bucket-empty", "full-closure"):
        raise GraphError("comparison needs complete runs of both sweeps")

    statements = []

    distinct = r1.distinct_gamma()
    ok1 = distinct == r2.theta
    statements.append(
        StatementResult(
            1,
            ok1,
            "distinct exponents "
            + ("agree" if ok1 else f"differ: {list(map(str, distinct))} vs {list(map(str, r2.theta))}"),
        )
    )

    k_index = []
    for th in r2.theta:
        k_index.append(sum(1 for w in r1.gamma if w <= th))

    ok2 = True
    detail2 = "every partial arc set is contained in its matching window"
    prev = 0
    for p, kp in enumerate(k_index, start=1):
        t_pairs = r2.tgraphs[p].pairs()
        for k in range(prev + 1, kp + 1):
            g_pairs = r1.tgraphs[k].pairs()
            if not g_pairs <= t_pairs:
                ok2 = False
                extra = sorted(g_pairs - t_pairs)
                detail2 = f"step {k} holds arcs outside window {p}: {extra}"
                break
        if not ok2:
            break
        prev = kp
    if ok2 and k_index and k_index[-1] != r1.K:
        ok2 = False
        detail2 = f"window index ends at {k_index[-1]} but the sweep took {r1.K} steps"
    statements.append(StatementResult(2, ok2, detail2))

    ok3 = True
    detail3 = "nontrivial closed classes coincide at every matching index"
    ok4 = True
    detail4 = "absorbing vertices coincide at every matching index"
    for p, kp in enumerate(k_index, start=1):
        cc1 = closed_communicating_classes(
            _expanded_adjacency(r1.tgraphs[kp].arcs), vertices=g.states
        )
        cc2 = closed_communicating_classes(
            _expanded_adjacency(r2.tgraphs[p].arcs), vertices=g.states
        )
        if set(cc1.nontrivial) != set(cc2.nontrivial):
            ok3 = False
            detail3 = (
                f"at window {p} (step {kp}): "
                f"{[sorted(map(str, c)) for c in cc1.nontrivial]} vs "
                f"{[sorted(map(str, c)) for c in cc2.nontrivial]}"
            )
        if cc1.absorbing != cc2.absorbing:
            ok4 = False
            detail4 = (
                f"at window {p} (step {kp}): "
                f"{list(map(str, cc1.absorbing))} vs {list(map(str, cc2.absorbing))}"
            )
    statements.append(StatementResult(3, ok3, detail3))
    statements.append(StatementResult(4, ok4, detail4))

    return ComparisonReport(
        graph=g,
        statements=tuple(statements),
        k_index=tuple(k_index),
        alg1_gamma=r1.gamma,
        alg2_theta=r2.theta,
    )
