"""Built-in example chains used by tests, docs and the command line.

The two seven-state chains share one topology: an inner three-cycle
(1-2-3) that drains into a middle region (4, 5, 6) forming a larger cycle
around it, and a slow peripheral state 7.  The first variant carries
distinct fractional weights, so the single-arc sweep runs tie-free; the
second rounds the weights to integers, which piles up ties and exercises
the simultaneous sweep.
"""

from __future__ import annotations

from typing import Optional

from .chain import ChainGraph, chain_graph

__all__ = [
    "nested_cycle_chain",
    "nested_cycle_chain_integer",
    "two_state_chain",
    "tied_min_arc_chain",
    "tied_optimum_chain",
]


def nested_cycle_chain() -> ChainGraph:
    """Seven states, twelve arcs, all weights distinct; no prefactors."""
    return chain_graph(
        [
            (1, 2, 1),
            (2, 3, 3),
            (3, 1, "1.1"),
            (3, 4, 14),
            (1, 5, 2),
            (1, 6, "1.5"),
            (5, 4, "2.5"),
            (5, 6, "2.6"),
            (4, 3, "3.05"),
            (6, 5, "3.1"),
            (6, 7, "3.4"),
            (7, 6, "4.2"),
        ]
    )


def nested_cycle_chain_integer() -> ChainGraph:
    """Integer-weight variant with deliberate ties, plus an extra 2->5 arc."""
    return chain_graph(
        [
            (1, 2, 1),
            (2, 3, 3),
            (3, 1, 1),
            (3, 4, 14),
            (1, 5, 2),
            (1, 6, 2),
            (2, 5, 4),
            (5, 4, 3),
            (5, 6, 3),
            (4, 3, 3),
            (6, 5, 3),
            (6, 7, 3),
            (7, 6, 4),
        ]
    )


def two_state_chain(u12=1, u21=2, kappa: Optional[float] = None) -> ChainGraph:
    if kappa is None:
        return chain_graph([(1, 2, u12), (2, 1, u21)])
    return chain_graph([(1, 2, u12, kappa), (2, 1, u21, kappa)])


def tied_min_arc_chain() -> ChainGraph:
    """State 2 has two tied min-arcs; state 3 is absorbing."""
    return chain_graph([(1, 2, 1), (2, 1, 2), (2, 3, 2)])


def tied_optimum_chain() -> ChainGraph:
    """Two distinct optimal two-sink in-forests ({2->1} and {2->3})."""
    return chain_graph([(1, 2, 2), (2, 1, 1), (2, 3, 1), (3, 2, 5)])
