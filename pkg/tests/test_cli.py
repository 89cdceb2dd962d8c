import io
import json

import numpy as np
import pytest

from pptsquared import graphs
from pptsquared.cli import Report, dumps, main, parse_matrix, run
from pptsquared.ebcert import certificate_from_dict, verify_certificate
from pptsquared.errors import ParseError


def write_graph(tmp_path, g, name="g.txt"):
    path = tmp_path / name
    path.write_text(graphs.serialize_graph(g))
    return str(path)


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


FAST = ["--restarts", "4", "--iters", "100", "--theta-iters", "500"]


def test_thresholds_k2(tmp_path):
    code, out, _ = invoke(["thresholds", write_graph(tmp_path, graphs.complete_graph(2))] + FAST)
    assert code == 0
    rep = json.loads(out)
    r = rep["results"]
    assert rep["command"] == "thresholds"
    assert r["t_cp"] == pytest.approx(2.0) and r["t_ppt"] == pytest.approx(2.0)
    assert r["t_eb_bracket"] == pytest.approx([2.0, 2.0])
    assert r["ordered_edge_count"] == 2
    assert r["edge_convention"] == "ordered edges"
    assert r["t_pos_numeric"] == pytest.approx(1.0, abs=1e-6)
    assert set(rep) == {"command", "inputs", "results", "tolerances", "version"}


def test_thresholds_deterministic(tmp_path):
    path = write_graph(tmp_path, graphs.cycle_graph(5))
    outs = {invoke(["thresholds", path, "--seed", "7"] + FAST)[1] for _ in range(2)}
    assert len(outs) == 1


def test_theta(tmp_path):
    code, out, _ = invoke(["theta", write_graph(tmp_path, graphs.cycle_graph(5)), "--iters", "5000"])
    assert code == 0
    assert json.loads(out)["results"]["theta_bar"] == pytest.approx(5 ** 0.5, abs=1e-4)


def test_certify_emits_verifiable_certificate(tmp_path):
    g = graphs.petersen_graph()
    code, out, _ = invoke(["certify", write_graph(tmp_path, g), "--emit-certificate"])
    assert code == 0
    r = json.loads(out)["results"]
    assert r["verified"] and r["level_t"] == 30
    cert = certificate_from_dict(r["certificate"])
    assert verify_certificate(cert, g.adjacency())


def test_certify_without_emission(tmp_path):
    _, out, _ = invoke(["certify", write_graph(tmp_path, graphs.complete_graph(3))])
    assert "certificate" not in json.loads(out)["results"]


def test_ppt2_default_thresholds(tmp_path):
    a = write_graph(tmp_path, graphs.cycle_graph(5), "a.txt")
    b = write_graph(tmp_path, graphs.complete_graph(5), "b.txt")
    code, out, _ = invoke(["ppt2", a, b])
    assert code == 0
    r = json.loads(out)["results"]
    assert r["composition_is_gamma"] and r["eb_certified"] and r["branch"] == "certificate"


def test_ppt2_not_ppt_is_invalid(tmp_path):
    a = write_graph(tmp_path, graphs.complete_graph(2))
    code, _, err = invoke(["ppt2", a, a, "--t1", "1.0"])
    assert code == 1 and "not PPT" in err


def test_iterate(tmp_path):
    code, out, _ = invoke(["iterate", write_graph(tmp_path, graphs.complete_graph(2)), "--t", "4", "--steps", "10"])
    assert code == 0
    r = json.loads(out)["results"]
    assert len(r["trace"]) == 10
    assert r["fitted_rate"] == pytest.approx(0.25, abs=1e-3)
    assert r["distance_meaning"] == "EB-distance bound"


def test_iterate_empty_graph_defaults(tmp_path):
    code, out, _ = invoke(["iterate", write_graph(tmp_path, graphs.empty_graph(3))])
    assert code == 0
    assert json.loads(out)["inputs"]["t"] == 1.0


def test_classify_schur(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("2 2\n2 1+i\n1-i 2\n")
    code, out, _ = invoke(["classify-schur", str(path)])
    assert code == 0 and json.loads(out)["results"]["verdict"] == "CPNotPPT"
    path.write_text("2 2\n1 0\n0 3\n")
    assert json.loads(invoke(["classify-schur", str(path)])[1])["results"]["verdict"] == "PPT"
    path.write_text("2 2\n1 2\n2 1\n")
    assert json.loads(invoke(["classify-schur", str(path)])[1])["results"]["verdict"] == "NotCP"


def test_bad_graph_file_exit_1(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 1\n0 0\n")
    code, _, err = invoke(["thresholds", str(path)])
    assert code == 1 and err.startswith("error:")


def test_missing_file_exit_1(tmp_path):
    assert invoke(["theta", str(tmp_path / "nope.txt")])[0] == 1


def test_numerical_failure_exit_2(tmp_path, monkeypatch):
    from pptsquared import dynamics
    from pptsquared.errors import DefectivePeripheralSpectrum

    def boom(*a, **k):
        raise DefectivePeripheralSpectrum("forced")

    monkeypatch.setattr(dynamics, "peripheral_idempotent", boom)
    code, _, err = invoke(["iterate", write_graph(tmp_path, graphs.complete_graph(2))])
    assert code == 2 and "forced" in err


def test_usage_errors_exit_64(capsys):
    assert main(["no-such-command"]) == 64
    assert main([]) == 64
    assert main(["thresholds"]) == 64
    assert main(["iterate", "g.txt", "--t", "abc"]) == 64


def test_report_roundtrip():
    rep = Report("x", {"a": 1}, {"v": [0.1, 1e-30, float("inf")], "ok": True}, {"psd": 1e-9})
    again = Report.from_json(rep.to_json())
    assert again.results["v"] == [0.1, 1e-30, None]
    assert again.tolerances == {"psd": 1e-9}
    assert Report.from_json(again.to_json()).to_json() == again.to_json()


def test_dumps_sorted_and_exact():
    text = dumps({"b": 0.1 + 0.2, "a": 2.0, "c": [1, "s"]})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["b"] == 0.1 + 0.2
    assert '"a": 2.0' in text


@pytest.mark.parametrize("text,want", [
    ("1 1\ni\n", [[1j]]),
    ("1 2\n-i 2-3.5i\n", [[-1j, 2 - 3.5j]]),
    ("2 1\n1e-3\n+i\n", [[1e-3], [1j]]),
])
def test_parse_matrix(text, want):
    assert np.array_equal(parse_matrix(text), np.array(want, dtype=complex))


@pytest.mark.parametrize("text,line", [("", 1), ("2\n", 1), ("1 1\n1 2\n", 2), ("1 1\nfoo\n", 2), ("2 1\n1\n", 2)])
def test_parse_matrix_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_matrix(text)
    assert exc.value.line == line
