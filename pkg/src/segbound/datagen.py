"""Synthetic material data from piecewise-linear ground truths.

Strains are drawn with ``numpy.random.Generator(PCG64(seed))``: uniform over
the range, sorted, and any duplicates replaced by fresh draws. Stresses add
Gaussian noise drawn after all strains. Identical arguments give identical
bytes on every platform numpy supports.
"""

from __future__ import annotations

import numpy as np

from .refsolver import PiecewiseLinearLaw
from .segfit import MaterialDataSet

__all__ = ["gen_data", "ground_truths", "ground_truth", "TRI_MODULUS", "CABLE", "STRUT"]

# strain in raw units, stress in MPa
TRI_MODULUS = dict(
    law=PiecewiseLinearLaw.continuous([2000.0, 600.0, 2500.0], [-1.5e-3, 1.5e-3]),
    strain_range=(-6e-3, 6e-3), noise=0.15, r=200)
CABLE = dict(
    law=PiecewiseLinearLaw.continuous([20.0, 1500.0, 600.0], [0.0, 3e-3]),
    strain_range=(-2e-3, 7e-3), noise=0.1, r=150)
STRUT = dict(
    law=PiecewiseLinearLaw.continuous([1800.0, 600.0, 2400.0], [-1.5e-3, 0.5e-3]),
    strain_range=(-5e-3, 3e-3), noise=0.1, r=80)


def ground_truths() -> dict:
    """Synthetic materials by name; the names match the built-in models' material tags."""
    return {"tri-modulus": TRI_MODULUS, "cables": CABLE, "struts": STRUT}


def ground_truth(material: str) -> dict:
    """Look up a synthetic material; "default" means tri-modulus."""
    table = ground_truths()
    name = "tri-modulus" if material == "default" else material
    if name not in table:
        raise KeyError(f"no synthetic ground truth for material {material!r} "
                       f"(known: {', '.join(sorted(table))})")
    return table[name]


def gen_data(law: PiecewiseLinearLaw, r: int, noise: float, strain_range, seed: int,
             label: str = "") -> MaterialDataSet:
    if r < 2:
        raise ValueError("r must be at least 2")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    lo, hi = map(float, strain_range)
    if not hi > lo:
        raise ValueError("empty strain range")
    rng = np.random.Generator(np.random.PCG64(seed))
    strain = np.unique(rng.uniform(lo, hi, r))
    while strain.size < r:
        strain = np.unique(np.concatenate([strain, rng.uniform(lo, hi, r - strain.size)]))
    stress = law.stress(strain)
    if noise > 0:
        stress = stress + rng.normal(0.0, noise, r)
    return MaterialDataSet(strain, stress, label)
