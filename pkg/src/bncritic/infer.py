"""Exact inference on small discrete networks.

Two routes are provided: a brute-force full-joint oracle (joint_enumerate)
and a variable-elimination engine (posterior).  Both operate in linear
probability space with 64-bit floats; the networks here are desk-sized
(<= 10 variables, <= 4 states) so underflow is not a concern.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InvalidEvidenceError,
    TooLargeError,
    UnknownVariableError,
    ZeroEvidenceProbabilityError,
)
from .network import OBSERVABLE, Network

JOINT_GUARD = 10**7

Evidence = Mapping[str, int]


@dataclass(frozen=True, eq=False)
class PredictiveDistribution:
    """Probability vector over one variable's states given evidence on others."""

    variable: str
    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probabilities", np.asarray(self.probabilities, dtype=float))


@dataclass(frozen=True, eq=False)
class JointTable:
    """Full joint over all variables, shaped in topological order.

    probabilities has one axis per variable in `variables` order; flattening
    in C order puts the first (topologically earliest) variable slowest.
    """

    variables: tuple[str, ...]
    probabilities: np.ndarray


def _check_evidence(net: Network, ev: Evidence) -> None:
    for name, idx in ev.items():
        if not net.has_var(name):
            raise UnknownVariableError(name)
        v = net.var(name)
        if v.role != OBSERVABLE:
            raise InvalidEvidenceError(f"evidence on non-observable variable {name!r}")
        if not (0 <= idx < v.cardinality):
            raise InvalidEvidenceError(f"state index {idx} out of range for {name!r}")


def joint_enumerate(net: Network) -> JointTable:
    """Brute-force joint: product of CPT lookups over every configuration."""
    order = net.topological_order()
    cards = [net.var(n).cardinality for n in order]
    size = int(np.prod(cards))
    if size > JOINT_GUARD:
        raise TooLargeError(f"joint has {size} entries, guard is {JOINT_GUARD}")
    pos = {n: i for i, n in enumerate(order)}
    joint = np.ones(cards, dtype=float)
    for name in order:
        cpt = net.cpt(name)
        involved = list(cpt.parents) + [name]
        shape = [net.var(v).cardinality for v in involved]
        arr = cpt.array().reshape(shape)
        # permute involved axes into global topological positions
        perm = sorted(range(len(involved)), key=lambda i: pos[involved[i]])
        arr = arr.transpose(perm)
        full = [1] * len(order)
        for v in involved:
            full[pos[v]] = net.var(v).cardinality
        joint = joint * arr.reshape(full)
    return JointTable(tuple(order), joint)


def joint_posterior(jt: JointTable, ev: Evidence, query: str) -> PredictiveDistribution:
    """Oracle conditional marginal computed directly from a joint table."""
    if query not in jt.variables:
        raise UnknownVariableError(query)
    idx: list[object] = [slice(None)] * len(jt.variables)
    for name, s in ev.items():
        if name not in jt.variables:
            raise UnknownVariableError(name)
        idx[jt.variables.index(name)] = s
    sub = jt.probabilities[tuple(idx)]
    remaining = [v for v in jt.variables if v not in ev]
    qpos = remaining.index(query)
    axes = tuple(i for i in range(sub.ndim) if i != qpos)
    marginal = sub.sum(axis=axes) if axes else sub
    total = marginal.sum()
    if total <= 0.0:
        raise ZeroEvidenceProbabilityError("evidence has probability zero")
    return PredictiveDistribution(query, marginal / total)


class _Factor:
    __slots__ = ("names", "values")

    def __init__(self, names: tuple[str, ...], values: np.ndarray):
        self.names = names
        self.values = values


def _multiply(f1: _Factor, f2: _Factor) -> _Factor:
    names = f1.names + tuple(n for n in f2.names if n not in f1.names)
    pos = {n: i for i, n in enumerate(names)}
    def expand(f: _Factor) -> np.ndarray:
        src = [pos[n] for n in f.names]
        arr = np.moveaxis(f.values.reshape(f.values.shape + (1,) * (len(names) - f.values.ndim)),
                          range(len(f.names)), src)
        return arr
    return _Factor(names, expand(f1) * expand(f2))


def _sum_out(f: _Factor, name: str) -> _Factor:
    ax = f.names.index(name)
    return _Factor(f.names[:ax] + f.names[ax + 1:], f.values.sum(axis=ax))


def _network_factors(net: Network, ev: Evidence) -> list[_Factor]:
    factors = []
    for cpt in net.cpts:
        involved = list(cpt.parents) + [cpt.child]
        shape = [net.var(v).cardinality for v in involved]
        f = _Factor(tuple(involved), cpt.array().reshape(shape))
        for name, s in ev.items():
            if name in f.names:
                ax = f.names.index(name)
                f = _Factor(f.names[:ax] + f.names[ax + 1:],
                            np.take(f.values, s, axis=ax))
        factors.append(f)
    return factors


def _min_degree_order(hidden: set[str], factors: list[_Factor]) -> list[str]:
    """Eliminate lowest-degree variables first; ties broken lexicographically."""
    scopes = [set(f.names) for f in factors]
    order = []
    hidden = set(hidden)
    while hidden:
        degree = {}
        for h in hidden:
            neigh: set[str] = set()
            for s in scopes:
                if h in s:
                    neigh |= s
            neigh.discard(h)
            degree[h] = len(neigh)
        pick = min(sorted(hidden), key=lambda h: degree[h])
        order.append(pick)
        merged: set[str] = set()
        keep = []
        for s in scopes:
            if pick in s:
                merged |= s
            else:
                keep.append(s)
        merged.discard(pick)
        if merged:
            keep.append(merged)
        scopes = keep
        hidden.remove(pick)
    return order


def posterior(net: Network, ev: Evidence, query: str) -> PredictiveDistribution:
    """Conditional marginal of `query` given `ev`, by variable elimination."""
    if not net.has_var(query):
        raise UnknownVariableError(query)
    _check_evidence(net, ev)
    if query in ev:
        raise InvalidEvidenceError(f"query variable {query!r} appears in evidence")

    factors = _network_factors(net, ev)
    hidden = {v.name for v in net.variables} - set(ev) - {query}
    for name in _min_degree_order(hidden, factors):
        bucket = [f for f in factors if name in f.names]
        rest = [f for f in factors if name not in f.names]
        if not bucket:
            continue
        prod = bucket[0]
        for f in bucket[1:]:
            prod = _multiply(prod, f)
        factors = rest + [_sum_out(prod, name)]

    result = _Factor((), np.array(1.0))
    for f in factors:
        result = _multiply(result, f)
    # only `query` can remain in scope
    values = result.values if result.names == (query,) else np.moveaxis(
        result.values, result.names.index(query), 0).reshape(net.var(query).cardinality)
    total = values.sum()
    if total <= 0.0:
        raise ZeroEvidenceProbabilityError("evidence has probability zero")
    return PredictiveDistribution(query, values / total)


def loo_predictives(net: Network, row: Sequence[int] | Mapping[str, int]) -> list[PredictiveDistribution]:
    """Leave-one-out predictives: for each observable, condition on all others.

    `row` assigns a state index to every observable, either as a mapping or
    as a sequence in the network's observable declaration order.  The k-th
    result is the posterior of observable k given the rest of the row.
    """
    obs = [v.name for v in net.observables]
    if isinstance(row, Mapping):
        assignment = dict(row)
    else:
        if len(row) != len(obs):
            raise InvalidEvidenceError(f"row has {len(row)} entries, expected {len(obs)}")
        assignment = dict(zip(obs, (int(s) for s in row)))
    if set(assignment) != set(obs):
        missing = set(obs) - set(assignment)
        extra = set(assignment) - set(obs)
        raise InvalidEvidenceError(f"row must cover exactly the observables (missing={missing}, extra={extra})")
    out = []
    for name in obs:
        ev = {k: v for k, v in assignment.items() if k != name}
        try:
            out.append(posterior(net, ev, name))
        except ZeroEvidenceProbabilityError as e:
            raise ZeroEvidenceProbabilityError(
                f"leave-one-out evidence for node {name!r} has probability zero", node=name
            ) from e
    return out
