"""Parsing and binding of the three input artifacts: edges, scores, labels.

File formats (UTF-8 text, no headers):

* edges:  ``src_id,dst_id`` per line, direction "src follows dst";
  ``#``-prefixed lines are comments.
* scores: ``user_id,post_id,score`` per line, score in [0, 1]; the post id is
  kept only for diagnostics.
* labels: ``user_id,label`` per line, label in {0, 1}; 1 marks a hate-monger.

Blank lines are skipped everywhere. Scores are produced upstream by whatever
utterance model the deployment uses; this package never sees text.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import DegenerateDataError, InputError
from .graph import SocialGraph, build_graph, largest_wcc
from .serialize import csv_line

__all__ = [
    "ScoreTable",
    "LabelSet",
    "Dataset",
    "BindPolicy",
    "read_edges",
    "parse_scores",
    "parse_labels",
    "bind_dataset",
    "write_edges",
    "write_scores",
    "write_labels",
]


def _lines(stream: IO[str] | str) -> Iterator[tuple[int, str]]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        yield lineno, line


def read_edges(stream: IO[str] | str) -> list[tuple[str, str]]:
    """Parse an edge file into (follower, followee) pairs.

    Validation of the pairs themselves (self-loops, empty ids) happens in
    :func:`hateagg.graph.build_graph`; this reader rejects lines that are not
    two comma-separated fields.
    """
    pairs = []
    for lineno, line in _lines(stream):
        if line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise InputError(f"edges line {lineno}: expected 'src_id,dst_id', got {line!r}")
        src, dst = parts[0].strip(), parts[1].strip()
        if not src or not dst:
            raise InputError(f"edges line {lineno}: empty user id")
        if src == dst:
            raise InputError(f"edges line {lineno}: self-loop on {src!r}")
        pairs.append((src, dst))
    return pairs


class ScoreTable:
    """Per-user ordered sequences of post hate-probabilities.

    Users appear in first-seen order; scores keep file order within a user.
    A user may have zero posts only if registered explicitly via
    :meth:`register_user`.
    """

    def __init__(self) -> None:
        self._scores: dict[str, list[float]] = {}
        self.total_posts = 0

    def add(self, user: str, score: float) -> None:
        self._scores.setdefault(user, []).append(score)
        self.total_posts += 1

    def add_many(self, user: str, scores: Iterable[float]) -> None:
        seq = [float(s) for s in scores]
        self._scores.setdefault(user, []).extend(seq)
        self.total_posts += len(seq)

    def register_user(self, user: str) -> None:
        """Ensure the user exists, possibly with an empty post list."""
        self._scores.setdefault(user, [])

    def users(self) -> list[str]:
        return list(self._scores)

    def scores(self, user: str) -> np.ndarray:
        if user not in self._scores:
            raise InputError(f"unknown user {user!r} in score table")
        return np.asarray(self._scores[user], dtype=np.float64)

    def n_posts(self, user: str) -> int:
        return len(self._scores[user])

    def __contains__(self, user: str) -> bool:
        return user in self._scores

    def __len__(self) -> int:
        return len(self._scores)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for user in self._scores:
            yield user, self.scores(user)

    def restrict(self, users: Iterable[str]) -> "ScoreTable":
        """New table keeping only the given users (original order preserved)."""
        wanted = set(users)
        out = ScoreTable()
        for user, scores in self._scores.items():
            if user in wanted:
                out._scores[user] = list(scores)
                out.total_posts += len(scores)
        return out


def parse_scores(stream: IO[str] | str) -> ScoreTable:
    """Parse a score file; rejects non-numeric or out-of-range scores."""
    table = ScoreTable()
    for lineno, line in _lines(stream):
        parts = line.split(",")
        if len(parts) != 3:
            raise InputError(
                f"scores line {lineno}: expected 'user_id,post_id,score', got {line!r}"
            )
        user = parts[0].strip()
        if not user:
            raise InputError(f"scores line {lineno}: empty user id")
        try:
            score = float(parts[2])
        except ValueError:
            raise InputError(f"scores line {lineno}: non-numeric score {parts[2]!r}")
        if not (0.0 <= score <= 1.0):
            raise InputError(f"scores line {lineno}: score {score} outside [0, 1]")
        table.add(user, score)
    return table


class LabelSet:
    """user_id -> {0, 1}; 1 marks a hate-monger."""

    def __init__(self, labels: dict[str, int] | None = None) -> None:
        self._labels: dict[str, int] = dict(labels) if labels else {}

    def set(self, user: str, label: int) -> None:
        if label not in (0, 1):
            raise InputError(f"label for {user!r} must be 0 or 1, got {label}")
        existing = self._labels.get(user)
        if existing is not None and existing != label:
            raise InputError(
                f"conflicting labels for {user!r}: {existing} vs {label}"
            )
        self._labels[user] = label

    def get(self, user: str) -> int:
        return self._labels[user]

    def users(self) -> list[str]:
        return list(self._labels)

    def __contains__(self, user: str) -> bool:
        return user in self._labels

    def __len__(self) -> int:
        return len(self._labels)

    def items(self) -> Iterator[tuple[str, int]]:
        return iter(self._labels.items())

    def restrict(self, users: Iterable[str]) -> "LabelSet":
        wanted = set(users)
        out = LabelSet()
        for user, label in self._labels.items():
            if user in wanted:
                out._labels[user] = label
        return out


def parse_labels(stream: IO[str] | str) -> LabelSet:
    """Parse a label file; consistent duplicates are tolerated."""
    labels = LabelSet()
    for lineno, line in _lines(stream):
        parts = line.split(",")
        if len(parts) != 2:
            raise InputError(
                f"labels line {lineno}: expected 'user_id,label', got {line!r}"
            )
        user = parts[0].strip()
        if not user:
            raise InputError(f"labels line {lineno}: empty user id")
        try:
            label = int(parts[1])
        except ValueError:
            raise InputError(f"labels line {lineno}: non-integer label {parts[1]!r}")
        if label not in (0, 1):
            raise InputError(f"labels line {lineno}: label must be 0 or 1, got {label}")
        try:
            labels.set(user, label)
        except InputError as exc:
            raise InputError(f"labels line {lineno}: {exc}")
    return labels


@dataclass
class BindPolicy:
    """Knobs controlling how the three artifacts are reconciled.

    restrict_to_wcc
        Keep only the largest weakly connected component; users outside it
        are dropped (and reported), mirroring the evaluation protocol.
    allow_zero_post_users
        Accept labeled users without a score record; their aggregation
        features become zero vectors downstream.
    keep_unknown_scored_users
        Retain scored users missing from the graph as isolated nodes. Under
        ``restrict_to_wcc`` this is moot: isolated nodes can never join the
        largest component, so such users are dropped and reported instead.
    """

    restrict_to_wcc: bool = False
    allow_zero_post_users: bool = False
    keep_unknown_scored_users: bool = True


@dataclass
class Dataset:
    """A consistent bundle of graph, scores, and (possibly partial) labels.

    Immutable by convention after binding. ``discard_summary`` records what
    the policy dropped, for the run report.
    """

    graph: SocialGraph
    scores: ScoreTable
    labels: LabelSet
    discard_summary: dict = field(default_factory=dict)

    def labeled_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """(node_indices, labels) for labeled users, sorted by node index."""
        idx = sorted(self.graph.id_index[u] for u in self.labels.users())
        node_idx = np.asarray(idx, dtype=np.int64)
        y = np.asarray(
            [self.labels.get(self.graph.ids[i]) for i in idx], dtype=np.int64
        )
        return node_idx, y


def bind_dataset(
    graph: SocialGraph,
    scores: ScoreTable,
    labels: LabelSet,
    policy: BindPolicy | None = None,
) -> Dataset:
    """Reconcile the three artifacts into one consistent dataset.

    The resulting user universe is the graph's node set (possibly extended by
    scored users retained as isolated nodes, possibly restricted to the
    largest weakly connected component). Labeled users must exist in that
    universe and have a score record unless the policy says otherwise. The
    returned dataset never contains users absent from every input.
    """
    policy = policy or BindPolicy()
    summary: dict = {
        "dropped_by_wcc": 0,
        "dropped_scored_users": 0,
        "dropped_labels": 0,
    }

    known = set(graph.id_index)
    scored_outside = [u for u in scores.users() if u not in known]
    if policy.restrict_to_wcc:
        g = largest_wcc(graph)
        kept = set(g.id_index)
        summary["dropped_by_wcc"] = graph.node_count - g.node_count
        summary["dropped_scored_users"] = len(scored_outside) + sum(
            1 for u in scores.users() if u in known and u not in kept
        )
    else:
        if policy.keep_unknown_scored_users and scored_outside:
            src, dst = graph.edge_arrays()
            g = SocialGraph(
                graph.ids + sorted(scored_outside),
                src.astype(np.int64),
                dst.astype(np.int64),
            )
        else:
            g = graph
            summary["dropped_scored_users"] = len(scored_outside)
        kept = set(g.id_index)

    bound_scores = scores.restrict(kept)

    bound_labels = LabelSet()
    ever_seen = known | set(scores.users())
    for user, label in labels.items():
        if user not in ever_seen:
            raise InputError(f"label for unknown user {user!r}")
        if user not in kept:
            summary["dropped_labels"] += 1
            continue
        if user not in bound_scores:
            if not policy.allow_zero_post_users:
                raise InputError(
                    f"labeled user {user!r} has no score record "
                    "(set allow_zero_post_users to accept)"
                )
            bound_scores.register_user(user)
        bound_labels.set(user, label)

    summary["users"] = g.node_count
    summary["edges"] = g.edge_count
    summary["scored_users"] = len(bound_scores)
    summary["labeled_users"] = len(bound_labels)
    return Dataset(graph=g, scores=bound_scores, labels=bound_labels, discard_summary=summary)


# -- writers (inverse of the parsers; 17-digit floats round-trip exactly) ----


def write_edges(graph: SocialGraph, stream: IO[str]) -> None:
    for u, v in graph.edges():
        stream.write(f"{u},{v}\n")


def write_scores(table: ScoreTable, stream: IO[str]) -> None:
    """Emit ``user_id,post_id,score`` rows; post ids are synthesized as p<k>."""
    for user, scores in table.items():
        for k, s in enumerate(scores):
            stream.write(csv_line([user, f"p{k}", float(s)]) + "\n")


def write_labels(labels: LabelSet, stream: IO[str]) -> None:
    for user, label in labels.items():
        stream.write(f"{user},{label}\n")
