"""Dense mixed-binary linear model container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["MilpModel", "MilpSolution", "LpResult"]

SENSES = ("<=", "=", ">=")


@dataclass
class MilpModel:
    """Variables with finite bounds, linear rows, linear objective.

    Rows are stored sparsely while building and densified on demand.
    """

    name: str = "model"
    sense: str = "min"
    names: list[str] = field(default_factory=list)
    lb: list[float] = field(default_factory=list)
    ub: list[float] = field(default_factory=list)
    binary: list[bool] = field(default_factory=list)
    obj: dict[int, float] = field(default_factory=dict)
    obj_const: float = 0.0
    rows: list[dict[int, float]] = field(default_factory=list)
    row_senses: list[str] = field(default_factory=list)
    rhs: list[float] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_var(self, name, lb=0.0, ub=1.0, binary=False) -> int:
        if binary:
            lb, ub = max(0.0, lb), min(1.0, ub)
        if not (np.isfinite(lb) and np.isfinite(ub)):
            raise ValueError(f"variable {name} needs finite bounds")
        if lb > ub:
            raise ValueError(f"variable {name} has lb > ub")
        self.names.append(name)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.binary.append(bool(binary))
        return self.n - 1

    def add_row(self, coefs, sense, rhs, name="") -> int:
        """``coefs`` maps variable index to coefficient; repeated indices add up."""
        if sense not in SENSES:
            raise ValueError(f"bad sense {sense!r}")
        row: dict[int, float] = {}
        items = coefs.items() if isinstance(coefs, dict) else coefs
        for j, a in items:
            j = int(j)
            if not 0 <= j < self.n:
                raise IndexError(f"row {name!r} references undeclared variable {j}")
            row[j] = row.get(j, 0.0) + float(a)
        self.rows.append({j: a for j, a in row.items() if a != 0.0})
        self.row_senses.append(sense)
        self.rhs.append(float(rhs))
        self.row_names.append(name or f"c{len(self.rows)}")
        return len(self.rows) - 1

    def set_objective(self, coefs, sense="min", const=0.0):
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        self.sense = sense
        self.obj = {}
        items = coefs.items() if isinstance(coefs, dict) else coefs
        for j, a in items:
            self.obj[int(j)] = self.obj.get(int(j), 0.0) + float(a)
        self.obj_const = float(const)

    def arrays(self):
        """(c, A, senses, b, lb, ub, binary) as numpy arrays."""
        n = self.n
        A = np.zeros((self.n_rows, n))
        for i, row in enumerate(self.rows):
            for j, a in row.items():
                A[i, j] = a
        c = np.zeros(n)
        for j, a in self.obj.items():
            c[j] = a
        return (c, A, np.array(self.row_senses, dtype=object), np.array(self.rhs, dtype=float),
                np.array(self.lb, dtype=float), np.array(self.ub, dtype=float),
                np.array(self.binary, dtype=bool))

    def objective_value(self, x) -> float:
        return self.obj_const + sum(a * x[j] for j, a in self.obj.items())

    def row_activity(self, x) -> np.ndarray:
        return np.array([sum(a * x[j] for j, a in row.items()) for row in self.rows])

    def max_violation(self, x, scaled=True) -> float:
        """Largest constraint violation, optionally divided by the row's coefficient scale."""
        act = self.row_activity(x)
        worst = 0.0
        for i, (s, b) in enumerate(zip(self.row_senses, self.rhs)):
            v = act[i] - b
            viol = max(v, 0.0) if s == "<=" else (max(-v, 0.0) if s == ">=" else abs(v))
            if scaled and self.rows[i]:
                viol /= max(1.0, max(abs(a) for a in self.rows[i].values()))
            worst = max(worst, viol)
        x = np.asarray(x)
        bound_viol = np.maximum(np.array(self.lb) - x, 0.0).max(initial=0.0)
        bound_viol = max(bound_viol, np.maximum(x - np.array(self.ub), 0.0).max(initial=0.0))
        return max(worst, float(bound_viol))

    def copy(self) -> MilpModel:
        return MilpModel(name=self.name, sense=self.sense, names=list(self.names),
                         lb=list(self.lb), ub=list(self.ub), binary=list(self.binary),
                         obj=dict(self.obj), obj_const=self.obj_const,
                         rows=[dict(r) for r in self.rows], row_senses=list(self.row_senses),
                         rhs=list(self.rhs), row_names=list(self.row_names))

    def fix(self, j, value):
        self.lb[j] = self.ub[j] = float(value)


@dataclass
class LpResult:
    status: str                  # optimal | infeasible
    x: np.ndarray | None
    objective: float
    iterations: int = 0


@dataclass
class MilpSolution:
    status: str                  # optimal | infeasible | node_limit
    values: np.ndarray | None
    objective: float
    bound: float
    gap: float
    nodes: int = 0
    lp_iterations: int = 0
    seconds: float = 0.0

    def __getitem__(self, j):
        return self.values[j]
