"""Books versus triangles: exact invariants, prism blow-ups, conjecture checks."""
from .graph import (
    PRISM,
    PRISM_AUTOMORPHISMS,
    Graph,
    PatternGraph,
    blowup,
    complete_bipartite,
    construct_s_bn,
    empty_graph,
    is_isomorphic_small,
    parse_graph6,
    set_edge,
    write_graph6,
)
from .invariants import InvariantReport, bn_inequality, invariant_report

__version__ = "0.1.0"
