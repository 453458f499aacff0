"""
Scene-conditioned Object-Action graph backed by NetworkX.

The vertex space is objects × primitive kinds × step indices. It is never
materialised: nodes are validated on demand and only the paths of embedded
flows (plus transfer edges between them) are stored in a DiGraph.
"""

from __future__ import annotations
import logging
from typing import Iterator, NamedTuple

import networkx as nx

from ..config import defaults
from ..core.errors import EmptySequenceError, InvalidParamError, SliceViolationError
from ..models.actions import ActionFlow, PrimitiveAction, PrimitiveKind
from ..models.scene import SceneConfig
from ..models.tasks import ActionTransfer, SimpleTask

log = logging.getLogger(__name__)

INTRA = "intra"
INTER = "inter"


class Node(NamedTuple):
    object_id: str
    kind: PrimitiveKind
    step: int          # 1-based, relative to the owning simple task


class TaskGraph:
    """Lazy node space with a realised subgraph of embedded flows."""

    def __init__(self, objects: list[str], max_steps: int = defaults.DEFAULT_MAX_STEPS):
        if max_steps < 1:
            raise InvalidParamError(f"max_steps must be >= 1, got {max_steps}")
        self.objects: tuple[str, ...] = tuple(objects)
        self.actions: tuple[PrimitiveKind, ...] = tuple(PrimitiveKind)
        self.max_steps = max_steps
        self.graph = nx.DiGraph()
        self.inter_edges: list[ActionTransfer] = []

    # ------------------------------------------------------------------
    # Node space
    # ------------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.objects) * len(self.actions) * self.max_steps

    def nodes(self) -> Iterator[Node]:
        for oid in self.objects:
            for kind in self.actions:
                for step in range(1, self.max_steps + 1):
                    yield Node(oid, kind, step)

    def has_node(self, node: Node) -> bool:
        return (
            node.object_id in self.objects
            and isinstance(node.kind, PrimitiveKind)
            and 1 <= node.step <= self.max_steps
        )

    @staticmethod
    def is_intra_edge(u: Node, v: Node) -> bool:
        """Same object slice, next step."""
        return u.object_id == v.object_id and v.step == u.step + 1

    # ------------------------------------------------------------------
    # Realised subgraph
    # ------------------------------------------------------------------

    def add_path(self, segment: int, task: SimpleTask, nodes: list[Node]) -> None:
        """Vertices are keyed (segment, node) so two subtasks on one object never merge."""
        for node in nodes:
            self.graph.add_node((segment, node), task=task.name)
        for u, v in zip(nodes, nodes[1:]):
            self.graph.add_edge((segment, u), (segment, v), relation=INTRA)

    def add_transfer(self, segment: int, transfer: ActionTransfer, last: Node, first: Node) -> None:
        """Join the last node of `segment` to the first node of the next one."""
        self.inter_edges.append(transfer)
        self.graph.add_edge((segment, last), (segment + 1, first), relation=INTER, transfer=transfer.to_dict())

    @property
    def intra_edges(self) -> list[tuple[Node, Node]]:
        return [(u[1], v[1]) for u, v, r in self.graph.edges(data="relation") if r == INTRA]

    def horizon(self) -> int:
        """Nodes on the longest realised path (the whole chain once all transfers are added)."""
        if self.graph.number_of_nodes() == 0:
            return 0
        return nx.dag_longest_path_length(self.graph) + 1

    def is_consistent(self) -> bool:
        return nx.is_directed_acyclic_graph(self.graph) and all(
            self.is_intra_edge(u, v) for u, v in self.intra_edges
        )


def build_graph(scene: SceneConfig, max_steps: int = defaults.DEFAULT_MAX_STEPS) -> TaskGraph:
    graph = TaskGraph(sorted(scene.object_ids), max_steps)
    log.debug("Task graph over %d objects, %d implicit nodes", len(graph.objects), graph.node_count)
    return graph


def embed_flow(graph: TaskGraph, task: SimpleTask, flow: ActionFlow) -> list[Node]:
    """Place a flow on the target object's slice at steps 1..n."""
    if not flow:
        raise EmptySequenceError(f"cannot embed an empty flow for {task.name!r}")
    if len(flow) > graph.max_steps:
        raise SliceViolationError(
            f"flow for {task.name!r} has {len(flow)} actions, beyond max_steps={graph.max_steps}"
        )
    nodes = []
    for j, action in enumerate(flow, start=1):
        if not isinstance(action, PrimitiveAction):
            raise SliceViolationError(f"step {j} of {task.name!r} is not a primitive action: {action!r}")
        node = Node(task.target, action.kind, j)
        if not graph.has_node(node):
            raise SliceViolationError(f"node {node} lies outside the graph of this scene")
        nodes.append(node)
    for u, v in zip(nodes, nodes[1:]):
        if not TaskGraph.is_intra_edge(u, v):
            raise SliceViolationError(f"{u} -> {v} leaves the slice of {task.target}")
    return nodes
