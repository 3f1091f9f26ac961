"""Compile argument maps into labeled proposition pairs.

Related pairs come straight off the graph: for each RA/CA/MA node, every
information node wired into it is paired with every information node it
points at.  The no-relation (NO) class is synthesized by pairing up
propositions that participate in no relation, sized so NO makes up a fixed
share of the final dataset (65% by default).

Sampling is driven by a counter-based SHA-256 generator over the
lexicographically sorted candidate enumeration, so a (snapshot, config)
pair always compiles to the identical dataset, on any platform.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

from .aif_graph import (
    ArgumentMap,
    NodeKind,
    parse_argument_map,
    relation_nodes,
)
from .errors import EmptyCorpus, InsufficientPool, MalformedJson, SchemaViolation
from .util import MAX_SEED, draw_below, hash_stream

if TYPE_CHECKING:
    from .corpus_client import CorpusSnapshot
    from .dataset import PairDataset


class RelationLabel(str, Enum):
    RA = "RA"  # inference: proposition1 supports/justifies proposition2
    CA = "CA"  # conflict
    MA = "MA"  # rephrase
    NO = "NO"  # synthetic no-relation class


STANDARD_LABELS: tuple[str, ...] = tuple(m.value for m in RelationLabel)

_KIND_TO_LABEL = {
    NodeKind.INFERENCE: RelationLabel.RA.value,
    NodeKind.CONFLICT: RelationLabel.CA.value,
    NodeKind.REPHRASE: RelationLabel.MA.value,
}


class Casing(Enum):
    CASED = "cased"
    UNCASED = "uncased"


class NegativeScope(Enum):
    WITHIN_MAP = "map"
    WITHIN_CORPUS = "corpus"


@dataclass(frozen=True)
class LabeledPair:
    """One (proposition1, proposition2, label) sample.

    Provenance fields do not take part in equality so that a TSV round trip
    (which keeps only the three columns) restores an equal dataset.
    """

    proposition1: str
    proposition2: str
    label: str
    map_id: str = field(default="", compare=False)
    corpus_id: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.proposition1 or not self.proposition2:
            raise ValueError("labeled pair with empty proposition text")
        if self.label == RelationLabel.NO.value and self.proposition1 == self.proposition2:
            raise ValueError("degenerate NO self-pair")


@dataclass(frozen=True)
class CompileConfig:
    seed: int = 42
    casing: Casing = Casing.UNCASED
    no_ratio: Fraction = Fraction(65, 100)
    negative_scope: NegativeScope = NegativeScope.WITHIN_MAP

    def __post_init__(self):
        if not (0 < self.no_ratio < 1):
            raise ValueError(f"no_ratio must be in (0, 1), got {self.no_ratio}")
        if not (0 <= self.seed <= MAX_SEED):
            raise ValueError("seed must fit in 64 unsigned bits")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "casing": self.casing.value,
            "no_ratio": f"{self.no_ratio.numerator}/{self.no_ratio.denominator}",
            "negative_scope": self.negative_scope.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompileConfig":
        num, _, den = str(d["no_ratio"]).partition("/")
        return cls(
            seed=int(d["seed"]),
            casing=Casing(d["casing"]),
            no_ratio=Fraction(int(num), int(den or 1)),
            negative_scope=NegativeScope(d["negative_scope"]),
        )


@dataclass(frozen=True)
class CompileReport:
    maps_processed: int
    maps_skipped: tuple[tuple[str, str], ...]  # (map_id, reason)
    class_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "maps_processed": self.maps_processed,
            "maps_skipped": [list(item) for item in self.maps_skipped],
            "class_counts": dict(self.class_counts),
        }


def normalize_text(text: str, casing: Casing) -> str:
    """Collapse whitespace runs to single spaces, trim, lowercase iff uncased."""
    out = " ".join(text.split())
    if casing is Casing.UNCASED:
        out = out.lower()
    return out


def extract_related_pairs(amap: ArgumentMap, casing: Casing) -> list[LabeledPair]:
    """All (premise, conclusion, label) pairs reachable through RA/CA/MA nodes.

    A relation node with several premises or conclusions expands to the full
    cross product.  Edges touching non-information nodes are skipped, as are
    pairs whose text normalizes to empty.  Output is sorted by (relation id,
    premise id, conclusion id); exact duplicate triples are dropped.
    """
    by_id = {n.id: n for n in amap.nodes}
    incoming: dict[str, list[str]] = {}
    outgoing: dict[str, list[str]] = {}
    for e in amap.edges:
        incoming.setdefault(e.to_id, []).append(e.from_id)
        outgoing.setdefault(e.from_id, []).append(e.to_id)

    pairs: list[LabeledPair] = []
    seen: set[tuple[str, str, str]] = set()
    for s in relation_nodes(amap):
        label = _KIND_TO_LABEL[s.kind]
        premises = sorted(
            nid for nid in incoming.get(s.id, []) if by_id[nid].kind is NodeKind.INFORMATION
        )
        conclusions = sorted(
            nid for nid in outgoing.get(s.id, []) if by_id[nid].kind is NodeKind.INFORMATION
        )
        for pid in premises:
            for qid in conclusions:
                t1 = normalize_text(by_id[pid].text, casing)
                t2 = normalize_text(by_id[qid].text, casing)
                if not t1 or not t2:
                    continue
                triple = (t1, t2, label)
                if triple in seen:
                    continue
                seen.add(triple)
                pairs.append(
                    LabeledPair(t1, t2, label, map_id=amap.map_id, corpus_id=amap.corpus_id)
                )
    return pairs


def negative_count(related_count: int, no_ratio: Fraction) -> int:
    """Number of NO pairs needed for NO to make up `no_ratio` of the dataset.

    Exact integer arithmetic: ceil(related * r / (1 - r)).  At the default
    65/100 ratio this is ceil(13 * related / 7).
    """
    if related_count < 0:
        raise ValueError("related_count must be non-negative")
    if not (0 < no_ratio < 1):
        raise ValueError(f"no_ratio must be in (0, 1), got {no_ratio}")
    return math.ceil(related_count * no_ratio / (1 - no_ratio))


def collect_negative_pool(amap: ArgumentMap) -> list[str]:
    """Ids of information nodes that participate in no RA/CA/MA pair, id-sorted."""
    by_id = {n.id: n for n in amap.nodes}
    incoming: dict[str, list[str]] = {}
    outgoing: dict[str, list[str]] = {}
    for e in amap.edges:
        incoming.setdefault(e.to_id, []).append(e.from_id)
        outgoing.setdefault(e.from_id, []).append(e.to_id)

    related: set[str] = set()
    for s in relation_nodes(amap):
        premises = [nid for nid in incoming.get(s.id, []) if by_id[nid].kind is NodeKind.INFORMATION]
        conclusions = [nid for nid in outgoing.get(s.id, []) if by_id[nid].kind is NodeKind.INFORMATION]
        if premises and conclusions:
            related.update(premises)
            related.update(conclusions)

    return sorted(n.id for n in amap.nodes if n.kind is NodeKind.INFORMATION and n.id not in related)


def _canonical(t1: str, t2: str) -> tuple[str, str]:
    return (t1, t2) if t1 <= t2 else (t2, t1)


def sample_negative_pairs(
    pools: dict[str, list[str]],
    count: int,
    seed: int,
    scope: NegativeScope,
    corpus_id: str = "",
    exclude: set[tuple[str, str]] | None = None,
) -> list[LabeledPair]:
    """Draw `count` distinct unordered proposition pairs, labeled NO.

    `pools` maps map_id -> normalized proposition texts of that map's
    unrelated information nodes.  WITHIN_MAP pairs members of the same map;
    WITHIN_CORPUS pairs any two distinct texts across the corpus.  `exclude`
    holds canonical (sorted) text pairs that must never be emitted, e.g. the
    related pairs of the dataset under compilation.  Draws are uniform over
    the remaining candidates and fully determined by `seed`.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if not (0 <= seed <= MAX_SEED):
        raise ValueError("seed must fit in 64 unsigned bits")
    if count == 0:
        return []
    excluded = exclude or set()
    stream = hash_stream(seed)

    if scope is NegativeScope.WITHIN_MAP:
        chosen: dict[tuple[str, str], str] = {}
        for map_id in sorted(pools):
            texts = sorted({t for t in pools[map_id] if t})
            for i in range(len(texts)):
                for j in range(i + 1, len(texts)):
                    pair = (texts[i], texts[j])
                    if pair in excluded or pair in chosen:
                        continue
                    chosen[pair] = map_id
        candidates = sorted(chosen.items())
        available = len(candidates)
        if count > available:
            raise InsufficientPool(available, count)
        used: set[int] = set()
        out: list[LabeledPair] = []
        for _ in range(count):
            while True:
                k = draw_below(stream, available)
                if k not in used:
                    used.add(k)
                    break
            (t1, t2), map_id = candidates[k]
            out.append(LabeledPair(t1, t2, RelationLabel.NO.value, map_id=map_id, corpus_id=corpus_id))
        return out

    # WITHIN_CORPUS: the candidate space is every unordered pair of distinct
    # texts; it is indexed lazily instead of materialized.
    provenance: dict[str, str] = {}
    for map_id in sorted(pools):
        for t in pools[map_id]:
            if t and t not in provenance:
                provenance[t] = map_id
    texts = sorted(provenance)
    n = len(texts)
    total = n * (n - 1) // 2
    index_of = {t: i for i, t in enumerate(texts)}
    # cum[i] = number of pairs whose first member sorts before texts[i]
    cum = [0] * (n + 1)
    for i in range(n):
        cum[i + 1] = cum[i] + (n - 1 - i)

    def rank(i: int, j: int) -> int:
        return cum[i] + (j - i - 1)

    blocked: set[int] = set()
    for a, b in excluded:
        ia = index_of.get(a)
        ib = index_of.get(b)
        if ia is not None and ib is not None and ia != ib:
            blocked.add(rank(min(ia, ib), max(ia, ib)))
    available = total - len(blocked)
    if count > available:
        raise InsufficientPool(available, count)

    used = set()
    out = []
    for _ in range(count):
        while True:
            k = draw_below(stream, total)
            if k in used or k in blocked:
                continue
            used.add(k)
            break
        i = bisect_right(cum, k) - 1
        j = i + 1 + (k - cum[i])
        t1, t2 = texts[i], texts[j]
        out.append(
            LabeledPair(t1, t2, RelationLabel.NO.value, map_id=provenance[t1], corpus_id=corpus_id)
        )
    return out


def compile_corpus(snapshot: "CorpusSnapshot", config: CompileConfig) -> "PairDataset":
    """Compile a corpus snapshot into the full four-class pair dataset.

    Related pairs across all maps (map-id-sorted, per-map extraction order)
    come first, then the sampled NO pairs.  Maps that fail to parse are
    skipped and listed in the compile report.
    """
    from .dataset import PairDataset, Provenance  # deferred: dataset imports this module

    related: list[LabeledPair] = []
    pools: dict[str, list[str]] = {}
    skipped: list[tuple[str, str]] = []
    processed = 0
    node_text: dict[str, dict[str, str]] = {}

    for map_id, raw in sorted(snapshot.maps):
        try:
            text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
            amap = parse_argument_map(text, map_id, snapshot.corpus_id)
        except (MalformedJson, SchemaViolation, UnicodeDecodeError) as exc:
            skipped.append((map_id, str(exc)))
            continue
        processed += 1
        related.extend(extract_related_pairs(amap, config.casing))
        node_text[map_id] = {n.id: n.text for n in amap.nodes}
        pool_texts = [
            normalize_text(node_text[map_id][nid], config.casing)
            for nid in collect_negative_pool(amap)
        ]
        pools[map_id] = [t for t in pool_texts if t]

    if not related:
        raise EmptyCorpus(f"corpus '{snapshot.corpus_id}' compiled to zero related pairs")

    no_needed = negative_count(len(related), config.no_ratio)
    exclude = {_canonical(p.proposition1, p.proposition2) for p in related}
    negatives = sample_negative_pairs(
        pools,
        no_needed,
        config.seed,
        config.negative_scope,
        corpus_id=snapshot.corpus_id,
        exclude=exclude,
    )

    pairs = related + negatives
    counts = {label: 0 for label in STANDARD_LABELS}
    for p in pairs:
        counts[p.label] += 1
    report = CompileReport(
        maps_processed=processed,
        maps_skipped=tuple(skipped),
        class_counts=counts,
    )
    provenance = Provenance(
        corpus_id=snapshot.corpus_id,
        content_digest=snapshot.content_digest,
        compile_config=config,
        report=report,
    )
    return PairDataset(pairs=tuple(pairs), label_set=STANDARD_LABELS, provenance=provenance)
