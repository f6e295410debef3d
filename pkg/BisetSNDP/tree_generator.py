"""
ASCII rendering of laminar biset forests.
"""

from typing import Dict, List, Optional

from .biset import Biset, LaminarForest, owner


def _label(forest: LaminarForest, b: Biset, owned: Dict[Biset, List[int]]) -> str:
    parts = [b.describe()]
    if b in forest.edge_of:
        u, v = forest.edge_of[b]
        parts.append(f"edge ({u},{v})")
    if owned.get(b):
        parts.append("owns " + ",".join(str(u) for u in owned[b]))
    return "  ".join(parts)


def render_laminar_forest(forest: LaminarForest, title: Optional[str] = None) -> str:
    """
    Draw the tree rooted at (V,V) with ├──/└── connectors, listing for every
    node the edge it witnesses and the vertices it owns.
    """
    owned: Dict[Biset, List[int]] = {}
    for u in range(forest.universe.bit_length()):
        if (forest.universe >> u) & 1:
            owned.setdefault(owner(forest, u), []).append(u)

    tree_lines: List[str] = []
    if title:
        tree_lines.append(title)
    tree_lines.append(_label(forest, forest.root, owned) + "  (root)")

    def add_children(node: Biset, prefix: str = "") -> None:
        children = sorted(forest.children(node), key=Biset.sort_key)
        for i, child in enumerate(children):
            is_last = i == len(children) - 1
            tree_lines.append(f"{prefix}{'└── ' if is_last else '├── '}{_label(forest, child, owned)}")
            add_children(child, prefix + ("    " if is_last else "│   "))

    add_children(forest.root)
    return "\n".join(tree_lines)
