import json

import pytest

from cnnbench.cli import main
from cnnbench.engine import run, trace_to_json
from cnnbench.generators import tight1, tight2
from cnnbench.model import parse_instance
from cnnbench.scalar import Scalar


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_generate_and_ratio(tmp_path, capsys):
    out = tmp_path / "pair.json"
    assert main(["generate", "--kind", "tight1", "--cycles", "3",
                 "--out", str(out)]) == 0
    blob = json.loads(out.read_text())
    assert blob["meta"]["name"] == "tight1"
    assert main(["ratio", "--pair", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "3 + 2·√3" in captured
    assert "6.4641016151" in captured
    assert "matches expected" in captured


def test_generate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        main(["generate", "--kind", "random", "--seed", "7", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()


def test_generate_bad_cycles_exits_2(tmp_path):
    out = tmp_path / "x.json"
    assert main(["generate", "--kind", "tight1", "--cycles", "0",
                 "--out", str(out)]) == 2
    assert not out.exists()


def test_run_and_verify_roundtrip(tmp_path, capsys):
    pair_path = tmp_path / "pair.json"
    main(["generate", "--kind", "tight2", "--cycles", "1", "--out", str(pair_path)])
    trace_path = tmp_path / "trace.json"
    assert main(["run", "--instance", str(pair_path),
                 "--trace", str(trace_path)]) == 0
    out = capsys.readouterr().out
    assert "6.4641016151" in out  # cost 3 + 2*sqrt3
    report = tmp_path / "report.json"
    assert main(["verify", "--trace", str(trace_path), "--opt", str(pair_path),
                 "--report", str(report)]) == 0
    assert json.loads(report.read_text())[0]["ok"] is True


def test_run_empty_instance(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    write(inst, {"start": {"x": 0, "y": 0}, "segments": []})
    assert main(["run", "--instance", str(inst),
                 "--trace", str(tmp_path / "t.json")]) == 0
    assert "0.0000000000" in capsys.readouterr().out


def test_run_diagonal_requires_epsilon(tmp_path):
    inst = tmp_path / "diag.json"
    write(inst, {"start": {"x": 0, "y": 0},
                 "segments": [{"dir": {"dx": "1/2", "dy": "1/2"}, "len": 2}]})
    trace = tmp_path / "t.json"
    assert main(["run", "--instance", str(inst), "--trace", str(trace)]) == 2
    assert main(["run", "--instance", str(inst), "--trace", str(trace),
                 "--rectify-epsilon", "1/8"]) == 0


def test_rectify_command(tmp_path):
    inst = tmp_path / "diag.json"
    write(inst, {"start": {"x": 0, "y": 0},
                 "segments": [{"dir": {"dx": "1/2", "dy": "1/2"}, "len": 2}]})
    out = tmp_path / "rect.json"
    assert main(["rectify", "--instance", str(inst), "--epsilon", "1/4",
                 "--out", str(out)]) == 0
    rect = parse_instance(out.read_text())
    assert rect.is_axis_parallel()
    assert rect.total_length == Scalar(2)


def test_verify_batch_and_threads(tmp_path, monkeypatch):
    paths = []
    for i, cycles in enumerate((1, 2)):
        p = tmp_path / f"pair{i}.json"
        p.write_text(json.dumps(tight1(cycles).to_json()))
        paths.append(str(p))
    monkeypatch.setenv("CNN_BENCH_THREADS", "2")
    assert main(["verify", "--pair", *paths]) == 0
    monkeypatch.setenv("CNN_BENCH_THREADS", "0")
    assert main(["verify", "--pair", *paths]) == 2


def test_verify_detects_corruption(tmp_path):
    pair = tight2(1)
    tr = run(pair.instance)
    blob = trace_to_json(tr)
    # inflate a recorded cost mid-trace
    blob["events"][4]["cost_on"] = {"a": ["99", "1"], "b": ["0", "1"]}
    trace_path = write(tmp_path / "bad.json", blob)
    opt_path = write(tmp_path / "opt.json", pair.to_json())
    assert main(["verify", "--trace", trace_path, "--opt", opt_path]) == 1


def test_verify_infeasible_opt_exits_2(tmp_path):
    pair = tight1(1)
    trace_path = write(tmp_path / "t.json", trace_to_json(run(pair.instance)))
    opt_path = write(tmp_path / "o.json", {"breakpoints": [
        {"s": 0, "x": 50, "y": 50},
        {"s": {"a": ["5", "2"], "b": ["-1", "2"]}, "x": 50, "y": 50},
    ]})
    assert main(["verify", "--trace", trace_path, "--opt", opt_path]) == 2


def test_unit_commands(tmp_path, capsys):
    reqs = write(tmp_path / "reqs.json",
                 [{"x": 2, "y": 5}, {"x": 4, "y": 1}, {"x": 4, "y": 9}])
    assert main(["unit", "--algo", "sweet4", "--requests", reqs,
                 "--out", str(tmp_path / "tr.json")]) == 0
    assert "$4" in capsys.readouterr().out
    assert main(["unit", "--algo", "opt", "--requests", reqs]) == 0
    assert "$2" in capsys.readouterr().out
    transcript = json.loads((tmp_path / "tr.json").read_text())
    assert len(transcript) == 3


def test_unit_adversary(capsys):
    assert main(["unit", "--algo", "adversary", "--rounds", "30"]) == 0
    out = capsys.readouterr().out
    assert "online: $30" in out


def test_unit_ortho3_rejects_nonorthogonal(tmp_path):
    reqs = write(tmp_path / "bad.json", [{"x": 0, "y": 5}, {"x": 1, "y": 6}])
    assert main(["unit", "--algo", "ortho3", "--requests", reqs]) == 2


def test_unit_opt_empty(tmp_path, capsys):
    reqs = write(tmp_path / "none.json", [])
    assert main(["unit", "--algo", "opt", "--requests", reqs]) == 0
    assert "$0" in capsys.readouterr().out


def test_render_outputs_svg_and_csv(tmp_path):
    pair_path = tmp_path / "pair.json"
    main(["generate", "--kind", "tight1", "--cycles", "1", "--out", str(pair_path)])
    trace_path = tmp_path / "trace.json"
    main(["run", "--instance", str(pair_path), "--trace", str(trace_path)])
    svg = tmp_path / "fig.svg"
    assert main(["render", "--trace", str(trace_path), "--opt", str(pair_path),
                 "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.lstrip().startswith("<?xml")
    assert "request" in text and "offline" in text
    csv_text = (tmp_path / "fig.csv").read_text()
    assert csv_text.startswith("s,server_x,server_y,phase")


def test_render_is_deterministic(tmp_path):
    pair_path = tmp_path / "pair.json"
    main(["generate", "--kind", "fig2", "--out", str(pair_path)])
    trace_path = tmp_path / "trace.json"
    main(["run", "--instance", str(pair_path), "--trace", str(trace_path)])
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        main(["render", "--trace", str(trace_path), "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()


def test_parse_error_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["run", "--instance", str(bad),
                 "--trace", str(tmp_path / "t.json")]) == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--kind", "nonsense", "--out", "x"])
    assert exc.value.code == 2
