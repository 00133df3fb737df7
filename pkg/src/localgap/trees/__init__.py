"""Automatic speedup for LCLs on bounded-degree trees."""
import itertools

from .engine import ClassInfo, TreeEngine, TypeInfo
from .hierarchy import (Caps, ExtractResult, HierarchyState, Intractable, LabelRule, NeedLabel,
                        SearchResult, build_hierarchy, core_region_graph, extract_f, search_feasible)
from .partial import _subtree  # noqa: F401
from .partial import (Node, NotExtendible, PartialTree, Tripartition, TreeSpecError, brute_extendible,
                      brute_fingerprint, canonical, chain_view, complete_labeling, leaf,
                      legal_labeling_exists, make_node, path_core, path_node, star, tripartition)
from .surgery import (ExtendError, LabelError, PumpError, SurgeryError, duplicate_cut, extend,
                      label_apply, label_region, middle_edge, pump, pump_split, replace)
from .synth import FeasibilityError, SynthResult, chain_solve, synthesize_run


def class_of(spec, tree, delta: int = 3, engine: TreeEngine | None = None):
    """Class fingerprint of a unipolar tree (Node or PartialTree)."""
    eng = engine or TreeEngine(spec, delta)
    node = tree.to_node() if isinstance(tree, PartialTree) else tree
    return eng.class_fp(node)


def type_of(spec, tree, delta: int = 3, engine: TreeEngine | None = None):
    """Type fingerprint of a bipolar tree (core tuple or PartialTree)."""
    eng = engine or TreeEngine(spec, delta)
    core = tree.to_core() if isinstance(tree, PartialTree) else tuple(tree)
    return eng.type_fp(core)


def extendible_set(spec, tree: PartialTree, engine: TreeEngine | None = None) -> set[tuple]:
    """Extendible labelings of sorted(D1∪D2) as label-index tuples.

    Unipolar trees under radius-1 port-free specs go through the memoized engine;
    everything else is enumerated.
    """
    if len(tree.poles) != 1 or spec.r != 1 or spec.uses_ports:
        return brute_extendible(spec, tree)[1]
    eng = engine or TreeEngine(spec, max(2, tree.g.max_degree()))
    root = tree.poles[0]
    node = tree.to_node()
    subs = {u: _subtree(tree, u, root) for u in tree.g.neighbors(root)}
    order = []
    for k in node.kids:
        u = next(u for u, s in subs.items() if s is k and u not in order)
        order.append(u)
    bnd = sorted([root] + order)
    ext = set()
    for a in eng.allowed(eng.li(node.lab)):
        opts = [eng.C(eng.cls(k), a, node.inp) for k in node.kids]
        for combo in itertools.product(*opts):
            vals = dict(zip(order, combo))
            vals[root] = a
            ext.add(tuple(vals[v] for v in bnd))
    return ext


__all__ = [
    "Caps", "ClassInfo", "ExtendError", "ExtractResult", "FeasibilityError", "HierarchyState",
    "Intractable", "LabelError", "LabelRule", "NeedLabel", "Node", "NotExtendible", "PartialTree",
    "PumpError", "SearchResult", "SurgeryError", "SynthResult", "TreeEngine", "TreeSpecError",
    "Tripartition", "TypeInfo", "brute_extendible", "brute_fingerprint", "build_hierarchy", "canonical",
    "chain_solve", "chain_view", "class_of", "complete_labeling", "core_region_graph", "duplicate_cut",
    "extend", "extendible_set", "extract_f", "label_apply", "label_region", "leaf",
    "legal_labeling_exists", "make_node", "middle_edge", "path_core", "path_node", "pump", "pump_split", "replace",
    "search_feasible", "star", "synthesize_run", "tripartition", "type_of",
]
