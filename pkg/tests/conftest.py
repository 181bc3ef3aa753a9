from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings

from hateagg import (
    BindPolicy,
    Dataset,
    LabelSet,
    ScoreTable,
    bind_dataset,
    build_graph,
)

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def make_dataset(
    edges: list[tuple[str, str]],
    scores: dict[str, list[float]] | None = None,
    labels: dict[str, int] | None = None,
    policy: BindPolicy | None = None,
    isolated: tuple[str, ...] = (),
) -> Dataset:
    """Assemble a dataset from literal python structures."""
    graph = build_graph(edges, isolated_ids=isolated)
    table = ScoreTable()
    for user, vals in (scores or {}).items():
        table.register_user(user)
        for v in vals:
            table.add(user, v)
    labelset = LabelSet()
    for user, label in (labels or {}).items():
        labelset.set(user, label)
    return bind_dataset(graph, table, labelset, policy or BindPolicy(allow_zero_post_users=True))


def random_dataset(
    rng: np.random.Generator,
    max_users: int = 200,
    max_posts: int = 50,
    edge_prob: float | None = None,
    label_fraction: float = 0.0,
) -> Dataset:
    """Random graph + scores (+ optional labels) for oracle-equivalence runs.

    Some users get zero posts on purpose; ids are shuffled so node order
    differs from lexicographic order.
    """
    n = int(rng.integers(2, max_users + 1))
    p = edge_prob if edge_prob is not None else float(rng.uniform(0.005, 0.1))
    ids = [f"user{i}" for i in rng.permutation(n)]
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    edges = [(ids[a], ids[b]) for a, b in zip(src, dst)]

    table = ScoreTable()
    for i in range(n):
        table.register_user(ids[i])
        n_posts = int(rng.integers(0, max_posts + 1))
        for v in rng.random(n_posts):
            table.add(ids[i], float(v))

    labelset = LabelSet()
    if label_fraction > 0:
        chosen = rng.random(n) < label_fraction
        for i in np.flatnonzero(chosen):
            labelset.set(ids[int(i)], int(rng.integers(0, 2)))

    graph = build_graph(edges, isolated_ids=tuple(ids))
    return bind_dataset(
        graph, table, labelset, BindPolicy(allow_zero_post_users=True)
    )
