"""Pin-jointed structures: model, JSON format, assembly of L and N.

Internal units are N, mm, MPa. With ``u`` the free nodal displacements,
member strains are ``L u + eps0`` and nodal equilibrium reads
``N sigma = lam * f``, where ``N = L^T diag(A * length)`` by virtual work.

Structure file (JSON)::

    {
      "name": "...",
      "units": {"length": "m", "force": "kN", "area": "mm2"},
      "dim": 2,
      "nodes":    [{"id": "n1", "xyz": [0, 0]}, ...],
      "members":  [{"id": "1", "a": "n1", "b": "n2", "area": 1000,
                    "group": "default", "eps0": 0.0}, ...],
      "supports": [{"node": "n1", "comp": "x"}, ...],
      "loads":    [{"node": "n4", "comp": "y", "value": -2.1}, ...],
      "groups":   {"default": "tri-modulus"}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ModelError, ZeroLengthMember

__all__ = [
    "Member",
    "StructuralModel",
    "AssembledSystem",
    "assemble",
    "builtin_models",
    "load_model",
    "save_model",
]

COMPONENTS = "xyz"
LENGTH_UNITS = {"mm": 1.0, "cm": 10.0, "m": 1000.0}
FORCE_UNITS = {"N": 1.0, "kN": 1000.0, "MN": 1.0e6}
AREA_UNITS = {"mm2": 1.0, "cm2": 100.0, "m2": 1.0e6}


@dataclass(frozen=True)
class Member:
    a: int
    b: int
    area: float
    group: str = "default"
    eps0: float = 0.0
    id: str = ""


@dataclass
class StructuralModel:
    """Nodes in mm, areas in mm^2, loads in N (base vector, scaled by lambda)."""

    nodes: np.ndarray
    members: list[Member]
    supports: set[tuple[int, int]]
    loads: list[tuple[int, int, float]]
    groups: dict[str, str] = field(default_factory=dict)
    node_ids: list[str] = field(default_factory=list)
    name: str = ""
    notes: str = ""

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        if self.nodes.ndim != 2 or self.nodes.shape[1] not in (2, 3):
            raise ModelError("nodes must be an (n, 2) or (n, 3) array")
        if not self.node_ids:
            self.node_ids = [str(i + 1) for i in range(len(self.nodes))]
        self.supports = set(self.supports)
        self.validate()

    @property
    def dim(self) -> int:
        return int(self.nodes.shape[1])

    @property
    def m(self) -> int:
        return len(self.members)

    def free_dofs(self) -> list[tuple[int, int]]:
        return [(n, c) for n in range(len(self.nodes)) for c in range(self.dim)
                if (n, c) not in self.supports]

    @property
    def d(self) -> int:
        return len(self.free_dofs())

    def node_index(self, node_id) -> int:
        try:
            return self.node_ids.index(str(node_id))
        except ValueError:
            raise ModelError(f"unknown node {node_id!r}") from None

    def validate(self):
        n = len(self.nodes)
        for e, mem in enumerate(self.members):
            if not (0 <= mem.a < n and 0 <= mem.b < n) or mem.a == mem.b:
                raise ModelError(f"member {e + 1} must join two distinct existing nodes")
            if not mem.area > 0:
                raise ModelError(f"member {e + 1} has non-positive area")
            if np.linalg.norm(self.nodes[mem.b] - self.nodes[mem.a]) == 0:
                raise ZeroLengthMember(f"member {e + 1} has zero length")
            if self.groups and mem.group not in self.groups:
                raise ModelError(f"member {e + 1} uses group {mem.group!r} with no data binding")
        for node, comp in self.supports:
            if not (0 <= node < n and 0 <= comp < self.dim):
                raise ModelError(f"invalid support ({node}, {comp})")
        for node, comp, _ in self.loads:
            if not (0 <= node < n and 0 <= comp < self.dim):
                raise ModelError(f"invalid load ({node}, {comp})")
        if self.d < 1:
            raise ModelError("model has no free degrees of freedom")

    def group_names(self) -> list[str]:
        seen = []
        for mem in self.members:
            if mem.group not in seen:
                seen.append(mem.group)
        return seen


@dataclass(frozen=True)
class AssembledSystem:
    L: np.ndarray          # (m, d), 1/mm
    N: np.ndarray          # (d, m), mm^2
    eps0: np.ndarray       # (m,)
    f_base: np.ndarray     # (d,), N
    lengths: np.ndarray    # (m,), mm
    areas: np.ndarray      # (m,), mm^2
    dofs: tuple            # ((node, comp), ...) for each free dof
    groups: tuple          # group name per member

    @property
    def m(self) -> int:
        return int(self.L.shape[0])

    @property
    def d(self) -> int:
        return int(self.L.shape[1])

    def dof_index(self, node: int, comp: int) -> int | None:
        try:
            return self.dofs.index((node, comp))
        except ValueError:
            return None


def assemble(model: StructuralModel) -> AssembledSystem:
    """Compatibility matrix L and equilibrium matrix N of the free dofs."""
    dofs = model.free_dofs()
    index = {dof: j for j, dof in enumerate(dofs)}
    m, d = model.m, len(dofs)
    L = np.zeros((m, d))
    lengths = np.zeros(m)
    for e, mem in enumerate(model.members):
        vec = model.nodes[mem.b] - model.nodes[mem.a]
        ell = float(np.linalg.norm(vec))
        if ell == 0:
            raise ZeroLengthMember(f"member {e + 1} has zero length")
        c = vec / ell
        lengths[e] = ell
        for comp in range(model.dim):
            jb = index.get((mem.b, comp))
            ja = index.get((mem.a, comp))
            if jb is not None:
                L[e, jb] += c[comp] / ell
            if ja is not None:
                L[e, ja] -= c[comp] / ell
    areas = np.array([mem.area for mem in model.members], dtype=float)
    N = (L * (areas * lengths)[:, None]).T
    f = np.zeros(d)
    for node, comp, val in model.loads:
        j = index.get((node, comp))
        if j is not None:
            f[j] += val
    eps0 = np.array([mem.eps0 for mem in model.members], dtype=float)
    return AssembledSystem(L=L, N=N, eps0=eps0, f_base=f, lengths=lengths, areas=areas,
                           dofs=tuple(dofs), groups=tuple(mem.group for mem in model.members))


# ---------------------------------------------------------------- file format

def _comp(c) -> int:
    if isinstance(c, int):
        return c
    c = str(c).lower().lstrip("u")
    if c not in COMPONENTS:
        raise DataError(f"unknown component {c!r}")
    return COMPONENTS.index(c)


def model_from_dict(doc: dict) -> StructuralModel:
    units = doc.get("units", {})
    try:
        ls = LENGTH_UNITS[units.get("length", "mm")]
        fs = FORCE_UNITS[units.get("force", "N")]
        as_ = AREA_UNITS[units.get("area", "mm2")]
    except KeyError as exc:
        raise DataError(f"unsupported unit {exc.args[0]!r}") from None
    try:
        ids = [str(n["id"]) for n in doc["nodes"]]
        nodes = np.array([n["xyz"] for n in doc["nodes"]], dtype=float) * ls
        pos = {nid: i for i, nid in enumerate(ids)}
        members = [Member(a=pos[str(mb["a"])], b=pos[str(mb["b"])], area=float(mb["area"]) * as_,
                          group=str(mb.get("group", "default")), eps0=float(mb.get("eps0", 0.0)),
                          id=str(mb.get("id", i + 1)))
                   for i, mb in enumerate(doc["members"])]
        supports = {(pos[str(s["node"])], _comp(s["comp"])) for s in doc.get("supports", [])}
        loads = [(pos[str(ld["node"])], _comp(ld["comp"]), float(ld["value"]) * fs)
                 for ld in doc.get("loads", [])]
    except KeyError as exc:
        raise DataError(f"structure file: missing or unknown key {exc.args[0]!r}") from None
    groups = dict(doc.get("groups", {}))
    if not groups:
        groups = {mem.group: mem.group for mem in members}
    return StructuralModel(nodes=nodes, members=members, supports=supports, loads=loads,
                           groups=groups, node_ids=ids, name=str(doc.get("name", "")),
                           notes=str(doc.get("notes", "")))


def model_to_dict(model: StructuralModel) -> dict:
    ids = model.node_ids
    return {
        "name": model.name,
        "notes": model.notes,
        "units": {"length": "mm", "force": "N", "area": "mm2"},
        "dim": model.dim,
        "nodes": [{"id": ids[i], "xyz": [float(v) for v in xyz]}
                  for i, xyz in enumerate(model.nodes)],
        "members": [{"id": mem.id or str(e + 1), "a": ids[mem.a], "b": ids[mem.b],
                     "area": mem.area, "group": mem.group, "eps0": mem.eps0}
                    for e, mem in enumerate(model.members)],
        "supports": [{"node": ids[n], "comp": COMPONENTS[c]} for n, c in sorted(model.supports)],
        "loads": [{"node": ids[n], "comp": COMPONENTS[c], "value": v} for n, c, v in model.loads],
        "groups": dict(model.groups),
    }


def load_model(path) -> StructuralModel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read structure file {path}: {exc}") from exc
    return model_from_dict(doc)


def save_model(model: StructuralModel, path):
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


# ---------------------------------------------------------------- built-ins

def truss_3x2() -> StructuralModel:
    """Planar 3-bay, 2-storey X-braced truss, 1 m bays, 29 members.

    Nodes form a 4 x 3 grid (columns left to right, rows top to bottom).
    Member numbering: 1-3, 4-6, 7-9 horizontals of the top, middle and
    bottom rows; 10-13 and 14-17 verticals of the upper and lower storey;
    18-20 / 21-23 "\\" diagonals of the upper / lower storey; 24-26 /
    27-29 "/" diagonals. The top-left and bottom-left nodes are pinned,
    which gives d = 20 (the support layout is inferred from d). A
    downward 2.1 kN base load acts at each of the two rightmost bottom
    nodes.
    """
    bay = 1000.0
    ids, xyz = [], []
    for row in range(3):            # 0 = top
        for col in range(4):
            ids.append(f"r{row + 1}c{col + 1}")
            xyz.append((col * bay, (2 - row) * bay))
    node = {nid: i for i, nid in enumerate(ids)}

    def n(row, col):
        return node[f"r{row}c{col}"]

    pairs = []
    for row in (1, 2, 3):
        pairs += [(n(row, c), n(row, c + 1)) for c in (1, 2, 3)]
    for row in (1, 2):
        pairs += [(n(row, c), n(row + 1, c)) for c in (1, 2, 3, 4)]
    for row in (1, 2):
        pairs += [(n(row, c), n(row + 1, c + 1)) for c in (1, 2, 3)]
    for row in (1, 2):
        pairs += [(n(row + 1, c), n(row, c + 1)) for c in (1, 2, 3)]
    members = [Member(a, b, 1000.0, "default", 0.0, str(e + 1)) for e, (a, b) in enumerate(pairs)]
    supports = {(n(1, 1), 0), (n(1, 1), 1), (n(3, 1), 0), (n(3, 1), 1)}
    loads = [(n(3, 3), 1, -2100.0), (n(3, 4), 1, -2100.0)]
    return StructuralModel(nodes=np.array(xyz), members=members, supports=supports, loads=loads,
                           groups={"default": "tri-modulus"}, node_ids=ids, name="truss-3x2",
                           notes="supports inferred: top-left and bottom-left nodes pinned (d = 20)")


def cable_strut() -> StructuralModel:
    """Twisted triangular prism: 12 cables, 3 struts, 3-D.

    Bottom and top layers are equilateral triangles with side sqrt(3) m
    (circumradius 1 m), 1.5 m apart, the top rotated by pi/4. Each strut
    joins bottom node j (angle theta_j) to the top node at
    theta_j + 2 pi/3 + pi/4, which makes it 2.4863 m long. Side cables
    join each bottom node to the top nodes at +pi/4 and -5 pi/12.
    Supports: bottom nodes B1 (x, y, z), B2 (x, z), B3 (z), d = 12.
    Loads: 1.1 kN downward at each top node. Initial strains 2e-3 in
    cables and -0.4e-3 in struts.
    """
    R, H = 1000.0, 1500.0
    rot = math.pi / 4
    ids, xyz = [], []
    for j in range(3):
        th = 2 * math.pi * j / 3
        ids.append(f"B{j + 1}")
        xyz.append((R * math.cos(th), R * math.sin(th), 0.0))
    for j in range(3):
        th = 2 * math.pi * j / 3 + rot
        ids.append(f"T{j + 1}")
        xyz.append((R * math.cos(th), R * math.sin(th), H))
    B = [0, 1, 2]
    T = [3, 4, 5]
    members = []
    cable_pairs = [(B[0], B[1]), (B[1], B[2]), (B[2], B[0]),
                   (T[0], T[1]), (T[1], T[2]), (T[2], T[0])]
    for j in range(3):
        cable_pairs.append((B[j], T[j]))              # top node at +pi/4
        cable_pairs.append((B[j], T[(j - 1) % 3]))    # top node at -5pi/12
    for a, b in cable_pairs:
        members.append(Member(a, b, 500.0, "cables", 2.0e-3, str(len(members) + 1)))
    for j in range(3):
        members.append(Member(B[j], T[(j + 1) % 3], 1000.0, "struts", -0.4e-3,
                              str(len(members) + 1)))
    supports = {(B[0], 0), (B[0], 1), (B[0], 2), (B[1], 0), (B[1], 2), (B[2], 2)}
    loads = [(t, 2, -1100.0) for t in T]
    return StructuralModel(nodes=np.array(xyz), members=members, supports=supports, loads=loads,
                           groups={"cables": "cables", "struts": "struts"}, node_ids=ids,
                           name="cable-strut",
                           notes="6 bottom dofs fixed: B1 xyz, B2 xz, B3 z (choice not given in source)")


def single_bar(length=1000.0, area=100.0) -> StructuralModel:
    """One horizontal bar, left end pinned, right end on a roller: one free axial dof."""
    return StructuralModel(nodes=np.array([(0.0, 0.0), (length, 0.0)]),
                           members=[Member(0, 1, area, "default", 0.0, "1")],
                           supports={(0, 0), (0, 1), (1, 1)}, loads=[(1, 0, 1000.0)],
                           groups={"default": "default"}, node_ids=["A", "B"], name="bar")


def two_bar() -> StructuralModel:
    """Symmetric two-bar planar truss with a downward tip load (d = 2)."""
    nodes = np.array([(-1000.0, 1000.0), (1000.0, 1000.0), (0.0, 0.0)])
    members = [Member(0, 2, 500.0, "default", 0.0, "1"), Member(1, 2, 500.0, "default", 0.0, "2")]
    supports = {(0, 0), (0, 1), (1, 0), (1, 1)}
    return StructuralModel(nodes=nodes, members=members, supports=supports,
                           loads=[(2, 1, -1000.0)], groups={"default": "default"},
                           node_ids=["L", "R", "tip"], name="two-bar")


def three_bar() -> StructuralModel:
    """Three bars meeting at a loaded node (statically indeterminate, d = 2)."""
    nodes = np.array([(-1000.0, 1000.0), (0.0, 1000.0), (1000.0, 1000.0), (0.0, 0.0)])
    members = [Member(i, 3, 500.0, "default", 0.0, str(i + 1)) for i in range(3)]
    supports = {(i, c) for i in range(3) for c in range(2)}
    return StructuralModel(nodes=nodes, members=members, supports=supports,
                           loads=[(3, 1, -1500.0), (3, 0, 300.0)], groups={"default": "default"},
                           node_ids=["A", "B", "C", "tip"], name="three-bar")


def braced_panel() -> StructuralModel:
    """Square panel with both diagonals, 6 members, d = 5."""
    s = 1000.0
    nodes = np.array([(0.0, 0.0), (s, 0.0), (s, s), (0.0, s)])
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]
    members = [Member(a, b, 800.0, "default", 0.0, str(e + 1)) for e, (a, b) in enumerate(pairs)]
    supports = {(0, 0), (0, 1), (1, 1)}
    return StructuralModel(nodes=nodes, members=members, supports=supports,
                           loads=[(2, 1, -1200.0), (3, 0, 400.0)], groups={"default": "default"},
                           node_ids=["n1", "n2", "n3", "n4"], name="braced-panel")


def builtin_models() -> dict[str, StructuralModel]:
    """Named built-in structures: the two full examples plus small test models."""
    return {
        "truss-3x2": truss_3x2(),
        "cable-strut": cable_strut(),
        "bar": single_bar(),
        "two-bar": two_bar(),
        "three-bar": three_bar(),
        "braced-panel": braced_panel(),
    }
