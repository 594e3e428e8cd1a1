"""P-ary hierarchical partition of a box, split one coordinate at a time.

A cell at depth h is split along axis ``h mod n`` into P equal-width slabs.
Representatives are cell centres. For odd P the middle child's centre is the
parent's representative, which is placed exactly (not recomputed from the box
edges) so the cached value can be reused without an extra evaluation.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .core import Box, BudgetExhausted, DomainError, format_float

logger = logging.getLogger(__name__)


@dataclass
class Cell:
    depth: int
    index: int
    box: Box
    representative: np.ndarray
    value: float
    split_axis_next: int
    expanded: bool = False
    reused_parent_value: bool = False


def child_geometry(box: Box, representative: np.ndarray, axis: int, arity: int):
    """Boxes and representatives of the ``arity`` children of a cell, in ascending
    order along ``axis``."""
    lo, hi = float(box.lower[axis]), float(box.upper[axis])
    step = (hi - lo) / arity
    mid = (arity - 1) / 2.0
    out = []
    for k in range(arity):
        c_lo = box.lower.copy()
        c_hi = box.upper.copy()
        c_lo[axis] = lo + k * step if k else lo
        c_hi[axis] = lo + (k + 1) * step if k + 1 < arity else hi
        rep = representative.copy()
        rep[axis] = representative[axis] + (k - mid) * step
        out.append((Box(c_lo, c_hi), rep))
    return out


class PartitionTree:
    """Tree of cells. Only leaves are tracked per depth; all cells are kept for dumps."""

    def __init__(self, domain: Box, arity: int = 3, reuse_center: bool = True):
        if arity < 2:
            raise DomainError(f"partition factor must be >= 2, got {arity}")
        if domain.is_degenerate():
            raise DomainError(f"domain must have positive width on every axis: {domain}")
        self.domain = domain
        self.arity = int(arity)
        self.reuse_center = reuse_center
        self.n = domain.n
        self.root: Cell | None = None
        self.leaves_by_depth: dict[int, list[Cell]] = defaultdict(list)
        self.cells: list[Cell] = []
        self.reused = 0
        self.partial = False

    @property
    def depth(self) -> int:
        """Deepest level that currently holds a leaf."""
        return max((h for h, leaves in self.leaves_by_depth.items() if leaves), default=0)

    @property
    def max_depth(self) -> int:
        return max((c.depth for c in self.cells), default=0)

    def leaves(self) -> list[Cell]:
        return [c for h in sorted(self.leaves_by_depth) for c in self.leaves_by_depth[h]]

    def expand(self, leaf: Cell, scalarized: Callable[[np.ndarray], float]) -> list[Cell]:
        return expand(self, leaf, scalarized)

    def best_leaf_at_depth(self, h: int) -> Cell | None:
        return best_leaf_at_depth(self, h)

    def locate(self, x) -> Cell:
        """Leaf whose box holds ``x``; boundary points go to the lower-index cell."""
        x = np.asarray(x, dtype=np.float64)
        best = None
        for c in self.leaves():
            if c.box.contains(x) and (best is None or (c.depth, c.index) < (best.depth, best.index)):
                best = c
        if best is None:
            raise DomainError(f"{x.tolist()} is outside the domain")
        return best

    def dump_csv(self, path) -> Path:
        """Write every cell as ``depth,index,lower...,upper...,rep...,value``."""
        n = self.n
        cols = ["depth", "index"] + [f"lower{i}" for i in range(n)] + [f"upper{i}" for i in range(n)] \
            + [f"rep{i}" for i in range(n)] + ["value"]
        lines = [",".join(cols)]
        for c in sorted(self.cells, key=lambda c: (c.depth, c.index)):
            nums = list(c.box.lower) + list(c.box.upper) + list(c.representative) + [c.value]
            lines.append(f"{c.depth},{c.index}," + ",".join(format_float(v) for v in nums))
        path = Path(path)
        path.write_text("\n".join(lines) + "\n")
        return path


def make_root(domain: Box, scalarized: Callable[[np.ndarray], float], arity: int = 3,
              reuse_center: bool = True) -> PartitionTree:
    """Create a tree with a single root cell evaluated at the box centre."""
    tree = PartitionTree(domain, arity, reuse_center)
    rep = domain.center
    value = scalarized(rep)
    root = Cell(0, 0, domain, rep, float(value), 0)
    tree.root = root
    tree.cells.append(root)
    tree.leaves_by_depth[0].append(root)
    return tree


def expand(tree: PartitionTree, leaf: Cell, scalarized: Callable[[np.ndarray], float]) -> list[Cell]:
    """Split ``leaf`` into P children and evaluate each child's centre.

    If the budget runs out part-way, the children created so far stay in the tree
    and :class:`BudgetExhausted` propagates to end the run.
    """
    h = leaf.depth
    siblings = tree.leaves_by_depth.get(h, [])
    if leaf.expanded or not any(c is leaf for c in siblings):
        raise DomainError(f"cell ({leaf.depth}, {leaf.index}) is not an unexpanded leaf")
    P = tree.arity
    axis = leaf.split_axis_next
    geometry = child_geometry(leaf.box, leaf.representative, axis, P)
    coincident = [np.array_equal(rep, leaf.representative) for _, rep in geometry]
    needs_eval = [not (tree.reuse_center and same) for same in coincident]
    counter = getattr(scalarized, "counter", None)
    if counter is not None and any(needs_eval) and counter.exhausted:
        # nothing would be created; leave the tree untouched
        raise BudgetExhausted("no evaluations left to expand a leaf")

    siblings.remove(leaf)
    leaf.expanded = True
    children: list[Cell] = []
    next_axis = (axis + 1) % tree.n
    try:
        for k, ((box, rep), fresh) in enumerate(zip(geometry, needs_eval)):
            if fresh:
                value = float(scalarized(rep))
                reused = False
            else:
                value = leaf.value
                reused = True
                tree.reused += 1
            child = Cell(h + 1, leaf.index * P + k, box, rep, value, next_axis, reused_parent_value=reused)
            children.append(child)
    except BudgetExhausted:
        tree.partial = True
        logger.debug("budget exhausted after %d of %d children of (%d, %d)", len(children), P, h, leaf.index)
        raise
    finally:
        tree.leaves_by_depth[h + 1].extend(children)
        tree.cells.extend(children)
    return children


def best_leaf_at_depth(tree: PartitionTree, h: int) -> Cell | None:
    """Leaf at depth ``h`` with the lowest value; ties go to the lowest index."""
    leaves = tree.leaves_by_depth.get(h)
    if not leaves:
        return None
    return min(leaves, key=lambda c: (c.value, c.index))
