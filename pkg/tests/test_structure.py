import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from segbound.errors import DataError, ZeroLengthMember
from segbound.structure import (Member, StructuralModel, assemble, builtin_models, load_model,
                                model_from_dict, model_to_dict, save_model)

MODELS = builtin_models()


def test_single_bar():
    sys_ = assemble(MODELS["bar"])
    assert sys_.d == 1 and sys_.m == 1
    assert sys_.L == pytest.approx(np.array([[1 / 1000.0]]))
    # N = L^T diag(A l): one bar gives N = [A]
    assert sys_.N == pytest.approx(np.array([[100.0]]))
    assert sys_.f_base == pytest.approx([1000.0])


def test_two_bar_by_hand():
    sys_ = assemble(MODELS["two-bar"])
    h = 0.5e-3      # cos 45 deg / (sqrt 2 m)
    assert sys_.L == pytest.approx(np.array([[h, -h], [-h, -h]]), abs=1e-15)
    ell = 1000.0 * np.sqrt(2)
    assert sys_.lengths == pytest.approx([ell, ell])
    assert sys_.N == pytest.approx(500.0 * ell * np.array([[h, -h], [-h, -h]]), rel=1e-12)
    # symmetric statics: each bar carries F / (2 cos 45 deg) in tension
    sig = np.linalg.solve(sys_.N, sys_.f_base)
    assert sig == pytest.approx([1000.0 / np.sqrt(2) / 500.0] * 2, rel=1e-12)


def test_truss_dimensions():
    mdl = MODELS["truss-3x2"]
    sys_ = assemble(mdl)
    assert (sys_.m, sys_.d) == (29, 20)
    assert np.linalg.matrix_rank(sys_.L) == 20
    assert sorted(set(np.round(sys_.lengths, 6))) == pytest.approx([1000.0, 1000.0 * np.sqrt(2)])
    assert sys_.f_base.sum() == pytest.approx(-4200.0)


def test_cable_strut_dimensions():
    mdl = MODELS["cable-strut"]
    sys_ = assemble(mdl)
    assert (sys_.m, sys_.d) == (15, 12) and mdl.dim == 3
    groups = list(sys_.groups)
    assert groups.count("cables") == 12 and groups.count("struts") == 3
    struts = sys_.lengths[[g == "struts" for g in groups]]
    assert struts == pytest.approx([2486.3] * 3, abs=0.05)
    assert np.linalg.matrix_rank(sys_.L) == 12
    assert set(sys_.eps0[:12]) == {2e-3} and set(sys_.eps0[12:]) == {-0.4e-3}


@pytest.mark.parametrize("name", sorted(MODELS))
def test_compatibility_is_linearized_elongation(name):
    mdl = MODELS[name]
    sys_ = assemble(mdl)
    rng = np.random.default_rng(3)
    u = rng.normal(size=sys_.d)
    h = 1e-4
    x = mdl.nodes.astype(float).copy()
    for j, (node, comp) in enumerate(sys_.dofs):
        x[node, comp] += h * u[j]
    for e, mem in enumerate(mdl.members):
        ell0 = np.linalg.norm(mdl.nodes[mem.b] - mdl.nodes[mem.a])
        ell1 = np.linalg.norm(x[mem.b] - x[mem.a])
        assert (ell1 - ell0) / ell0 / h == pytest.approx((sys_.L @ u)[e], rel=1e-4, abs=1e-12)


@pytest.mark.parametrize("name", sorted(MODELS))
@given(seed=st.integers(0, 2**32 - 1))
def test_virtual_work(name, seed):
    sys_ = assemble(MODELS[name])
    rng = np.random.default_rng(seed)
    u = rng.normal(size=sys_.d)
    sig = rng.normal(size=sys_.m)
    internal = np.sum(sig * sys_.areas * sys_.lengths * (sys_.L @ u))
    assert (sys_.N @ sig) @ u == pytest.approx(internal, rel=1e-10, abs=1e-9)


@pytest.mark.parametrize("name", sorted(MODELS))
def test_json_roundtrip(name, tmp_path):
    mdl = MODELS[name]
    save_model(mdl, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    a, b = assemble(mdl), assemble(back)
    for f in ("L", "N", "eps0", "f_base", "lengths", "areas"):
        assert np.array_equal(getattr(a, f), getattr(b, f)), f
    assert a.dofs == b.dofs and a.groups == b.groups and back.groups == mdl.groups
    assert model_to_dict(back) == model_to_dict(mdl)


def test_file_units():
    doc = {"units": {"length": "m", "force": "kN", "area": "cm2"},
           "nodes": [{"id": "a", "xyz": [0, 0]}, {"id": "b", "xyz": [2, 0]}],
           "members": [{"a": "a", "b": "b", "area": 1.5}],
           "supports": [{"node": "a", "comp": "x"}, {"node": "a", "comp": "y"},
                        {"node": "b", "comp": "y"}],
           "loads": [{"node": "b", "comp": "x", "value": 3}]}
    sys_ = assemble(model_from_dict(doc))
    assert sys_.lengths == pytest.approx([2000.0])
    assert sys_.areas == pytest.approx([150.0])
    assert sys_.f_base == pytest.approx([3000.0])


def test_file_errors(tmp_path):
    with pytest.raises(DataError):
        model_from_dict({"nodes": [{"id": "a", "xyz": [0, 0]}], "members": [{"a": "a", "b": "z",
                                                                            "area": 1}]})
    with pytest.raises(DataError):
        model_from_dict({"units": {"length": "furlong"}, "nodes": [], "members": []})
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(DataError):
        load_model(tmp_path / "bad.json")
    with pytest.raises(DataError):
        load_model(tmp_path / "missing.json")


def test_zero_length_member():
    with pytest.raises(ZeroLengthMember):
        StructuralModel(nodes=np.array([(0.0, 0.0), (0.0, 0.0)]),
                        members=[Member(0, 1, 1.0)], supports={(0, 0), (0, 1)}, loads=[])


def test_builtin_names_and_groups():
    assert {"truss-3x2", "cable-strut"} <= set(MODELS)
    assert MODELS["cable-strut"].groups == {"cables": "cables", "struts": "struts"}
    json.dumps(model_to_dict(MODELS["truss-3x2"]))
