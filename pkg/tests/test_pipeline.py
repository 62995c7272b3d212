import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from segbound import io, pipeline
from segbound.cli import main
from segbound.pipeline import ContainmentFailure, PipelineError, RunConfig, run_pipeline

SVG = "{http://www.w3.org/2000/svg}"


def test_two_bar_run(tmp_path):
    cfg = RunConfig(model="two-bar", lambdas=[0.5, 1.0, 1.5], outdir=str(tmp_path / "run"))
    res = run_pipeline(cfg)
    assert res.contained and len(res.bounds) == 3
    names = set(res.artifacts)
    assert names == {"data-default.csv", "fit.json", "set.json", "bounds.csv", "reference.csv",
                     "bounds.svg", "scatter.svg"}
    out = tmp_path / "run"
    comments, rows = io.read_table(out / "bounds.csv")
    meta = json.loads(comments[0][len("meta: "):])
    assert meta["seed"] == 0 and meta["config"]["model"] == "two-bar"
    assert meta["assumptions"] == [io.IID_ASSUMPTION]
    quad = meta["groups"]["default"]
    assert quad["ptilde"] == 186 and quad["epsilon"] == 0.1 and quad["delta"] == 0.1
    assert quad["tau"] == pytest.approx(res.sets["default"].tau)
    assert all(r["contained"] == "1" for r in rows)
    sets = io.load_groups(out / "set.json", "set")
    assert sets["default"].tau == res.sets["default"].tau
    assert io.read_json(out / "fit.json")["meta"]["versions"]["segbound"]
    root = ET.fromstring((out / "scatter.svg").read_text())
    assert len(list(root.iter(SVG + "circle"))) == 200
    assert json.loads(root.find(SVG + "metadata").text)["groups"]["default"]["ptilde"] == 186
    # a rerun differs only in the recorded output directory (no timestamp)
    cfg2 = RunConfig(model="two-bar", lambdas=[0.5, 1.0, 1.5], outdir=str(tmp_path / "run2"))
    run_pipeline(cfg2)
    _, r1 = io.read_table(out / "bounds.csv")
    _, r2 = io.read_table(tmp_path / "run2" / "bounds.csv")
    assert [dict(r, seconds=None) for r in r1] == [dict(r, seconds=None) for r in r2]
    for name in names - {"bounds.csv"}:
        a = (out / name).read_text()
        b = (tmp_path / "run2" / name).read_text().replace(cfg2.outdir, cfg.outdir)
        assert a == b, name


def test_given_data_is_used(tmp_path):
    first = run_pipeline(RunConfig(model="bar", lambdas=[0.2], outdir=str(tmp_path / "a"),
                                   seed=5))
    csv = tmp_path / "a" / "data-default.csv"
    second = run_pipeline(RunConfig(model="bar", lambdas=[0.2], outdir=str(tmp_path / "b"),
                                    data={"default": str(csv)}, seed=99))
    assert "data-default.csv" not in second.artifacts
    assert second.sets["default"].tau == first.sets["default"].tau


def test_groups_get_their_own_data(tmp_path):
    res = run_pipeline(RunConfig(model="cable-strut", lambdas=[1.0], outdir=str(tmp_path / "cs")))
    assert {"data-cables.csv", "data-struts.csv", "scatter-cables.svg",
            "scatter-struts.svg"} <= set(res.artifacts)
    assert res.contained
    assert res.sets["cables"].ptilde == 141 and res.sets["struts"].ptilde == 76


def test_stage_errors_leave_no_output(tmp_path):
    out = tmp_path / "never"
    with pytest.raises(PipelineError) as info:
        run_pipeline(RunConfig(model="two-bar", epsilon=0.1, delta=1e-12, lambdas=[1.0],
                               outdir=str(out)))
    assert info.value.stage == "ptilde" and info.value.exit_code == 2
    assert not out.exists()
    assert not list(tmp_path.glob(".segbound-*"))
    with pytest.raises(PipelineError) as info:
        run_pipeline(RunConfig(model="two-bar", lambdas=[50.0], outdir=str(out)))
    assert info.value.stage == "bound" and info.value.exit_code == 3
    with pytest.raises(PipelineError) as info:
        run_pipeline(RunConfig(model="no-such-model", outdir=str(out)))
    assert info.value.exit_code == 5


def test_containment_failure_exit_code(tmp_path, monkeypatch, capsys):
    real = pipeline.solve_path

    def shifted(system, laws, lams):
        states = real(system, laws, lams)
        for st in states:
            st.u = st.u + 10.0
        return states

    monkeypatch.setattr(pipeline, "solve_path", shifted)
    with pytest.raises(ContainmentFailure):
        run_pipeline(RunConfig(model="two-bar", lambdas=[1.0], outdir=str(tmp_path / "x")))
    assert (tmp_path / "x" / "bounds.csv").exists()      # the report is still written
    code = main(["pipeline", "--model", "two-bar", "--lambda-grid", "1.0", "--out",
                 str(tmp_path / "y")])
    assert code == 6
    assert "outside" in capsys.readouterr().err


def test_cli_pipeline_with_config(tmp_path, capsys):
    cfg = RunConfig(model="three-bar", lambdas=[0.5], outdir=str(tmp_path / "cfg"))
    (tmp_path / "c.json").write_text(json.dumps(cfg.to_dict()))
    assert main(["pipeline", "--config", str(tmp_path / "c.json"), "--epsilon", "0.2",
                 "--timestamp"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("lam,q_lower,q_upper,reference")
    sets = io.load_groups(tmp_path / "cfg" / "set.json", "set")
    assert sets["default"].epsilon == 0.2
    assert "generated:" in (tmp_path / "cfg" / "bounds.svg").read_text()


def test_config_validation():
    for bad in (dict(epsilon=0.0), dict(delta=1.0), dict(k=0), dict(mu=-1.0), dict(lambdas=[]),
                dict(data={"default": "/nonexistent.csv"})):
        with pytest.raises(Exception) as info:
            RunConfig(**bad).validate()
        assert getattr(info.value, "exit_code", None) == 5
    assert np.allclose(RunConfig().lambdas, np.arange(1, 11) / 10)
