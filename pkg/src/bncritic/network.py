"""Domain types for discrete Bayesian networks, validation, and the JSON file format.

A network is a DAG of categorical variables (latent or observable), each with a
conditional probability table (CPT) over its parents.  CPT rows are indexed
row-major over the ordered parent list with the first parent varying slowest.
State order is semantically meaningful: ranked scoring treats it as ordinal.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ParseError, UnknownVariableError, ValidationError

ROW_SUM_TOL = 1e-9

LATENT = "latent"
OBSERVABLE = "observable"


@dataclass(frozen=True)
class Variable:
    name: str
    role: str  # "latent" or "observable"
    states: tuple[str, ...]

    @property
    def cardinality(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class Cpt:
    """One CPT: rows are parent-state configurations, columns are child states."""

    child: str
    parents: tuple[str, ...]
    table: tuple[tuple[float, ...], ...]

    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=float)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class Network:
    """Immutable network: one CPT per variable; edge set derived from CPT parents."""

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]

    def var(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise UnknownVariableError(name)

    def cpt(self, child: str) -> Cpt:
        for c in self.cpts:
            if c.child == child:
                return c
        raise UnknownVariableError(child)

    def has_var(self, name: str) -> bool:
        return any(v.name == name for v in self.variables)

    @property
    def observables(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.role == OBSERVABLE)

    @property
    def latents(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.role == LATENT)

    def edges(self) -> tuple[tuple[str, str], ...]:
        out = []
        for c in self.cpts:
            for p in c.parents:
                out.append((p, c.child))
        return tuple(out)

    def parents(self, child: str) -> tuple[str, ...]:
        return self.cpt(child).parents

    def children(self, parent: str) -> tuple[str, ...]:
        return tuple(c.child for c in self.cpts if parent in c.parents)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm, ties broken by variable name. Raises on a cycle."""
        names = [v.name for v in self.variables]
        indeg = {n: 0 for n in names}
        childmap: dict[str, list[str]] = {n: [] for n in names}
        for p, c in self.edges():
            if p in indeg and c in indeg:
                indeg[c] += 1
                childmap[p].append(c)
        ready = sorted(n for n in names if indeg[n] == 0)
        order: list[str] = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            changed = False
            for c in childmap[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
                    changed = True
            if changed:
                ready.sort()
        if len(order) != len(names):
            raise ValueError("network contains a cycle")
        return tuple(order)


def _check_cpt(net: Network, cpt: Cpt, findings: list[Finding]) -> None:
    loc = f"cpt:{cpt.child}"
    if not net.has_var(cpt.child):
        findings.append(Finding("error", "UNKNOWN_CHILD", loc, "CPT child is not a declared variable"))
        return
    cards = []
    ok_parents = True
    if len(set(cpt.parents)) != len(cpt.parents):
        findings.append(Finding("error", "DUPLICATE_PARENT", loc, "duplicate parent name"))
        ok_parents = False
    for p in cpt.parents:
        if not net.has_var(p):
            findings.append(Finding("error", "UNKNOWN_PARENT", loc, f"parent {p!r} is not a declared variable"))
            ok_parents = False
        else:
            cards.append(net.var(p).cardinality)
    child_card = net.var(cpt.child).cardinality
    if ok_parents:
        expected_rows = int(np.prod(cards)) if cards else 1
        if len(cpt.table) != expected_rows:
            findings.append(
                Finding("error", "CPT_ROW_COUNT", loc,
                        f"expected {expected_rows} rows, found {len(cpt.table)}")
            )
    for i, row in enumerate(cpt.table):
        rloc = f"{loc}:row{i}"
        if len(row) != child_card:
            findings.append(
                Finding("error", "CPT_ROW_LENGTH", rloc,
                        f"expected {child_card} entries, found {len(row)}")
            )
            continue
        if any(p < 0.0 or p > 1.0 for p in row):
            findings.append(Finding("error", "CPT_ENTRY_RANGE", rloc, "entry outside [0, 1]"))
        s = float(sum(row))
        if abs(s - 1.0) > ROW_SUM_TOL:
            findings.append(Finding("error", "CPT_ROW_SUM", rloc, f"row sums to {s!r}"))


def validate(net: Network) -> ValidationReport:
    """Check every structural and probabilistic invariant; pure, never raises."""
    findings: list[Finding] = []
    seen = set()
    for v in net.variables:
        loc = f"variable:{v.name}"
        if v.name in seen:
            findings.append(Finding("error", "DUPLICATE_VARIABLE", loc, "duplicate variable name"))
        seen.add(v.name)
        if v.role not in (LATENT, OBSERVABLE):
            findings.append(Finding("error", "BAD_ROLE", loc, f"unknown role {v.role!r}"))
        if v.cardinality < 2:
            findings.append(Finding("error", "TOO_FEW_STATES", loc, "variables need at least 2 states"))
        if len(set(v.states)) != len(v.states):
            findings.append(Finding("error", "DUPLICATE_STATE", loc, "duplicate state label"))

    if not any(v.role == OBSERVABLE for v in net.variables):
        findings.append(Finding("error", "NO_OBSERVABLE", "network", "at least one observable variable required"))

    with_cpt = [c.child for c in net.cpts]
    for v in net.variables:
        if with_cpt.count(v.name) == 0:
            findings.append(Finding("error", "MISSING_CPT", f"variable:{v.name}", "no CPT for variable"))
        elif with_cpt.count(v.name) > 1:
            findings.append(Finding("error", "EXTRA_CPT", f"variable:{v.name}", "multiple CPTs for variable"))

    for c in net.cpts:
        _check_cpt(net, c, findings)

    try:
        net.topological_order()
    except ValueError:
        findings.append(Finding("error", "CYCLE", "network", "derived edge set contains a cycle"))

    return ValidationReport(tuple(findings))


def _parse_variable(obj, i: int) -> Variable:
    if not isinstance(obj, dict):
        raise ParseError(f"variables[{i}] is not an object")
    try:
        name, role, states = obj["name"], obj["role"], obj["states"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"variables[{i}] missing key: {e}") from e
    if not isinstance(name, str) or not isinstance(role, str) or not isinstance(states, list):
        raise ParseError(f"variables[{i}] has wrong field types")
    if not all(isinstance(s, str) for s in states):
        raise ParseError(f"variables[{i}].states must be strings")
    return Variable(name, role, tuple(states))


def _parse_cpt(obj, i: int) -> Cpt:
    if not isinstance(obj, dict):
        raise ParseError(f"cpts[{i}] is not an object")
    try:
        child, parents, table = obj["child"], obj["parents"], obj["table"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"cpts[{i}] missing key: {e}") from e
    if not isinstance(child, str) or not isinstance(parents, list) or not isinstance(table, list):
        raise ParseError(f"cpts[{i}] has wrong field types")
    rows = []
    for r, row in enumerate(table):
        if not isinstance(row, list) or not all(isinstance(p, (int, float)) for p in row):
            raise ParseError(f"cpts[{i}].table[{r}] must be a list of numbers")
        rows.append(tuple(float(p) for p in row))
    return Cpt(child, tuple(parents), tuple(rows))


def load_network(data: bytes | str, renormalize: bool = False) -> Network:
    """Parse the JSON network format and validate.

    Raises ParseError on malformed content and ValidationError (wrapping the
    report) on a well-formed but invalid network.  With renormalize=True,
    CPT rows are rescaled to sum to 1 before validation; off by default so
    authoring errors stay visible.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict) or "variables" not in doc or "cpts" not in doc:
        raise ParseError("top-level object must have 'variables' and 'cpts'")
    if not isinstance(doc["variables"], list) or not isinstance(doc["cpts"], list):
        raise ParseError("'variables' and 'cpts' must be arrays")
    variables = tuple(_parse_variable(v, i) for i, v in enumerate(doc["variables"]))
    cpts = tuple(_parse_cpt(c, i) for i, c in enumerate(doc["cpts"]))
    if renormalize:
        cpts = tuple(
            Cpt(c.child, c.parents,
                tuple(tuple(p / s if (s := sum(row)) > 0 else p for p in row) for row in c.table))
            for c in cpts
        )
    net = Network(variables, cpts)
    report = validate(net)
    if not report.ok:
        raise ValidationError(report)
    return net


def _net_doc(net: Network) -> dict:
    return {
        "variables": [
            {"name": v.name, "role": v.role, "states": list(v.states)}
            for v in net.variables
        ],
        "cpts": [
            {"child": c.child, "parents": list(c.parents),
             "table": [list(row) for row in c.table]}
            for c in net.cpts
        ],
    }


def save_network(net: Network) -> bytes:
    """Canonical serialization: fixed key order, declaration-order arrays.

    Floats use Python's shortest round-trip representation so that
    load(save(net)) preserves every probability bit-exactly.
    """
    report = validate(net)
    if not report.ok:
        raise ValidationError(report)
    return (json.dumps(_net_doc(net), indent=2) + "\n").encode("utf-8")


def network_id(net: Network) -> str:
    """Stable short identifier: hash of the canonical serialization."""
    return hashlib.sha256(save_network(net)).hexdigest()[:12]
