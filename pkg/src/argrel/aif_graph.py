"""Parse and query AIF argument maps.

An argument map is a typed directed graph: information nodes (I) hold
proposition text, scheme nodes mark inference (RA), conflict (CA) and
rephrase (MA) relations, and edges wire premises into scheme nodes and
scheme nodes into conclusions.  Documents follow the AIFdb JSON layout:
top-level ``nodes`` / ``edges`` arrays with ``nodeID`` / ``text`` / ``type``
and ``edgeID`` / ``fromID`` / ``toID`` fields.  Unknown JSON fields are
ignored; unknown node types (YA, TA, ...) are kept, not rejected, because
real corpora contain them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import MalformedJson, SchemaViolation


class NodeKind(Enum):
    INFORMATION = "I"
    INFERENCE = "RA"
    CONFLICT = "CA"
    REPHRASE = "MA"
    LOCUTION = "L"
    OTHER = "other"


RELATION_KINDS = frozenset({NodeKind.INFERENCE, NodeKind.CONFLICT, NodeKind.REPHRASE})

_TAG_TO_KIND = {
    "I": NodeKind.INFORMATION,
    "RA": NodeKind.INFERENCE,
    "CA": NodeKind.CONFLICT,
    "MA": NodeKind.REPHRASE,
    "L": NodeKind.LOCUTION,
}


def kind_from_tag(tag: str) -> NodeKind:
    """Map an AIF node-type tag to a NodeKind; anything unrecognized is OTHER."""
    return _TAG_TO_KIND.get(tag, NodeKind.OTHER)


@dataclass(frozen=True)
class AifNode:
    id: str
    text: str
    kind: NodeKind
    tag: str  # raw type tag, preserved verbatim (meaningful for OTHER)


@dataclass(frozen=True)
class AifEdge:
    id: str
    from_id: str
    to_id: str


@dataclass(frozen=True)
class ArgumentMap:
    map_id: str
    corpus_id: str
    nodes: tuple[AifNode, ...]
    edges: tuple[AifEdge, ...]

    def node_ids(self) -> set[str]:
        return {n.id for n in self.nodes}


@dataclass(frozen=True)
class Violation:
    rule: str
    subject_id: str
    map_id: str
    detail: str


def _id_str(value, map_id: str, location: str) -> str:
    # AIFdb emits ids both as strings and as bare integers.
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SchemaViolation(map_id, location, f"id must be a string or integer, got {type(value).__name__}")
    s = str(value)
    if not s:
        raise SchemaViolation(map_id, location, "id must be non-empty")
    return s


def _require(obj: dict, field: str, map_id: str, location: str):
    if field not in obj:
        raise SchemaViolation(map_id, location, f"missing required field '{field}'")
    return obj[field]


def parse_argument_map(json_text: str, map_id: str, corpus_id: str) -> ArgumentMap:
    """Parse one AIFdb-style JSON document into an ArgumentMap.

    Every node and edge in the document is kept.  Raises MalformedJson on a
    syntax failure and SchemaViolation on missing fields, duplicate ids,
    dangling edge endpoints or self-loops.
    """
    try:
        doc = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(map_id, f"{exc.msg} at byte {exc.pos}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation(map_id, "$", "document root must be an object")
    for field in ("nodes", "edges"):
        if not isinstance(doc.get(field), list):
            raise SchemaViolation(map_id, "$", f"missing or non-array '{field}'")

    nodes: list[AifNode] = []
    seen_nodes: set[str] = set()
    for i, raw in enumerate(doc["nodes"]):
        loc = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise SchemaViolation(map_id, loc, "node entry must be an object")
        node_id = _id_str(_require(raw, "nodeID", map_id, loc), map_id, f"{loc}.nodeID")
        text = _require(raw, "text", map_id, loc)
        if not isinstance(text, str):
            raise SchemaViolation(map_id, f"{loc}.text", "field 'text' must be a string")
        tag = _require(raw, "type", map_id, loc)
        if not isinstance(tag, str):
            raise SchemaViolation(map_id, f"{loc}.type", "field 'type' must be a string")
        if node_id in seen_nodes:
            raise SchemaViolation(map_id, f"{loc}.nodeID", f"duplicate node id '{node_id}'")
        seen_nodes.add(node_id)
        nodes.append(AifNode(id=node_id, text=text.strip(), kind=kind_from_tag(tag), tag=tag))

    edges: list[AifEdge] = []
    seen_edges: set[str] = set()
    for i, raw in enumerate(doc["edges"]):
        loc = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise SchemaViolation(map_id, loc, "edge entry must be an object")
        edge_id = _id_str(_require(raw, "edgeID", map_id, loc), map_id, f"{loc}.edgeID")
        from_id = _id_str(_require(raw, "fromID", map_id, loc), map_id, f"{loc}.fromID")
        to_id = _id_str(_require(raw, "toID", map_id, loc), map_id, f"{loc}.toID")
        if edge_id in seen_edges:
            raise SchemaViolation(map_id, f"{loc}.edgeID", f"duplicate edge id '{edge_id}'")
        seen_edges.add(edge_id)
        for endpoint in (from_id, to_id):
            if endpoint not in seen_nodes:
                raise SchemaViolation(map_id, loc, f"edge '{edge_id}' references missing node '{endpoint}'")
        if from_id == to_id:
            raise SchemaViolation(map_id, loc, f"edge '{edge_id}' is a self-loop on node '{from_id}'")
        edges.append(AifEdge(id=edge_id, from_id=from_id, to_id=to_id))

    return ArgumentMap(map_id=map_id, corpus_id=corpus_id, nodes=tuple(nodes), edges=tuple(edges))


def serialize_argument_map(amap: ArgumentMap) -> str:
    """Render a map back to AIFdb-style JSON (stable field order)."""
    doc = {
        "nodes": [{"nodeID": n.id, "text": n.text, "type": n.tag} for n in amap.nodes],
        "edges": [{"edgeID": e.id, "fromID": e.from_id, "toID": e.to_id} for e in amap.edges],
    }
    return json.dumps(doc, ensure_ascii=False)


def relation_nodes(amap: ArgumentMap) -> list[AifNode]:
    """All RA/CA/MA nodes of a map, id-sorted."""
    return sorted((n for n in amap.nodes if n.kind in RELATION_KINDS), key=lambda n: n.id)


def validate(amap: ArgumentMap) -> list[Violation]:
    """Check structural and content invariants; violations are data, not errors.

    Beyond the basic graph invariants (unique ids, resolvable endpoints, no
    self-loops) this flags relation nodes without a premise or a target and
    information nodes whose text is empty after trimming.
    """
    violations: list[Violation] = []
    seen_nodes: set[str] = set()
    for n in amap.nodes:
        if n.id in seen_nodes:
            violations.append(Violation("duplicate-node-id", n.id, amap.map_id, f"node id '{n.id}' occurs twice"))
        seen_nodes.add(n.id)

    seen_edges: set[str] = set()
    has_incoming: set[str] = set()
    has_outgoing: set[str] = set()
    for e in amap.edges:
        if e.id in seen_edges:
            violations.append(Violation("duplicate-edge-id", e.id, amap.map_id, f"edge id '{e.id}' occurs twice"))
        seen_edges.add(e.id)
        dangling = False
        for endpoint in (e.from_id, e.to_id):
            if endpoint not in seen_nodes:
                violations.append(Violation("dangling-edge", e.id, amap.map_id, f"endpoint '{endpoint}' does not resolve"))
                dangling = True
        if not dangling and e.from_id == e.to_id:
            violations.append(Violation("self-loop", e.id, amap.map_id, f"edge loops on node '{e.from_id}'"))
        has_outgoing.add(e.from_id)
        has_incoming.add(e.to_id)

    for n in amap.nodes:
        if n.kind in RELATION_KINDS:
            if n.id not in has_incoming:
                violations.append(Violation("relation-missing-source", n.id, amap.map_id, f"{n.tag} node has no incoming edge"))
            if n.id not in has_outgoing:
                violations.append(Violation("relation-missing-target", n.id, amap.map_id, f"{n.tag} node has no outgoing edge"))
        elif n.kind is NodeKind.INFORMATION and not n.text.strip():
            violations.append(Violation("empty-proposition", n.id, amap.map_id, "I-node text is empty"))

    return violations
