import json
import subprocess
import sys

import pytest

from spectrumkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, [json.loads(line) for line in out.splitlines()]


def test_check_ready_simulation_fails_on_initials(capsys):
    code, out, _ = run(capsys, "check", "--sem", "RS", "a.0", "a.0 + b.0")
    assert code == 1
    assert "initials" in out


def test_check_traces_hold(capsys):
    code, [payload] = run_json(capsys, "check", "--sem", "T", "a.b.0 + a.c.0", "a.(b.0 + c.0)")
    assert code == 0 and payload["holds"] is True and payload["witness"] is None


def test_check_failures_reports_observation(capsys):
    code, [payload] = run_json(capsys, "check", "--sem", "F", "a.b.0 + a.c.0", "a.(b.0 + c.0)")
    assert code == 1
    assert payload["witness"]["observation"] == {"kind": "pair-acts", "trace": "a", "refuse": ["c"]}
    code, out, _ = run(capsys, "check", "--sem", "F", "a.b.0 + a.c.0", "a.(b.0 + c.0)")
    assert "(a,{c})" in out


def test_equiv(capsys):
    assert run(capsys, "equiv", "--sem", "BS", "a.0 + b.0", "b.0 + a.0")[0] == 0
    assert run(capsys, "equiv", "--sem", "F", "a.b.0 + a.c.0", "a.(b.0 + c.0)")[0] == 1


def test_chi(capsys):
    code, out, _ = run(capsys, "chi", "--sem", "S", "--alphabet", "a,b", "a.0")
    assert code == 0 and out.strip() == "<a>tt"
    code, [payload] = run_json(capsys, "chi", "--sem", "RS", "--alphabet", "a,b", "0")
    assert payload == {"semantics": "RS", "process": "0", "chi": "[a]ff /\\ [b]ff",
                       "barChi": "<a>tt \\/ <b>tt", "bSize": 3}


def test_chi_needs_alphabet(capsys):
    code, _, err = run(capsys, "chi", "--sem", "S", "a.0")
    assert code == 2 and "--alphabet" in err


def test_chi_rejects_conformance(capsys):
    assert run(capsys, "chi", "--sem", "CONF", "--alphabet", "a", "a.0")[0] == 2


def test_barchi(capsys):
    code, out, _ = run(capsys, "barchi", "--sem", "RS", "--alphabet", "a,b", "0")
    assert code == 0 and out.strip() == "<a>tt \\/ <b>tt"


def test_mc(capsys):
    code, [payload] = run_json(capsys, "mc", "--sem", "F", "a.b.0", "<a>([a]ff /\\ [b]ff)")
    assert code == 1 and payload["satisfied"] is False and payload["inLogic"] is True
    assert run(capsys, "mc", "a.b.0", "<a><b>tt")[0] == 0


def test_decompose(capsys):
    code, [payload] = run_json(capsys, "decompose", "--sem", "S", "--alphabet", "a,b", "<a>tt \\/ <b>tt")
    assert code == 0
    assert payload["result"] == "decomposition" and payload["pivot"] == "a.0" and payload["chi"] == "<a>tt"
    assert payload["universeBound"] == {"alphabet": ["a", "b"], "maxDepth": 1}
    code, [payload] = run_json(capsys, "decompose", "--sem", "S", "--alphabet", "a", "ff")
    assert payload["result"] == "inconsistent"


def test_decompose_rejects_formula_outside_logic(capsys):
    assert run(capsys, "decompose", "--sem", "S", "--alphabet", "a,b", "[a]ff")[0] == 2


def test_verdict(capsys):
    code, records = run_json(capsys, "verdict", "--sem", "S", "--alphabet", "a,b", "ff", "<a>tt", "<a>tt \\/ <b>tt")
    assert code == 0
    assert [r["verdict"] for r in records] == ["inconsistent", "characteristic", "non-prime"]
    assert records[1]["pivot"] == "a.0"


def test_verdict_sampling_is_byte_identical(capsys):
    args = ["verdict", "--sem", "F", "--alphabet", "a,b", "--sample", "8", "--seed", "4", "--format", "json"]
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second and len(first.splitlines()) == 8


def test_spectrum(capsys):
    code, [payload] = run_json(capsys, "spectrum", "a.b.0+a.c.0", "a.(b.0+c.0)")
    assert code == 0
    matrix = payload["matrix"]
    assert len(matrix) == 21
    assert matrix["T"] == {"pq": True, "qp": True}
    assert matrix["CT"] == {"pq": True, "qp": True}
    assert matrix["F"]["pq"] is False and matrix["BS"]["pq"] is False
    assert matrix["S"]["pq"] is True


def test_enumerate(capsys):
    code, [payload] = run_json(capsys, "enumerate", "--alphabet", "a", "--depth", "2")
    assert code == 0 and payload["count"] == 4
    assert payload["members"] == ["0", "a.0", "a.a.0", "a.0 + a.a.0"]


def test_budget_exit_code(capsys):
    assert run(capsys, "enumerate", "--alphabet", "a,b", "--depth", "3")[0] == 3
    assert run(capsys, "enumerate", "--alphabet", "a,b", "--depth", "2", "--class-cap", "5")[0] == 3


def test_usage_exit_codes(capsys):
    assert run(capsys, "check", "--sem", "XYZ", "0", "0")[0] == 2
    assert run(capsys, "check", "--sem", "S", "a.", "0")[0] == 2
    assert run(capsys, "check", "--sem", "S", "--alphabet", "a", "b.0", "0")[0] == 2
    assert run(capsys, "enumerate", "--alphabet", "a", "--class-cap", "0")[0] == 2
    assert run(capsys, "enumerate", "--alphabet", "a", "--depth", "-1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2


def test_verify_conformance_chain(capsys):
    code, out, _ = run(capsys, "verify", "conformance-chain")
    assert code == 0
    assert out.strip() == "PASS conformance-chain: 8 checks, 0 violations"


def test_verify_linear_oracle_for_failures(capsys):
    code, [report] = run_json(capsys, "verify", "linear-oracle", "--sem", "F", "--sample", "200")
    assert code == 0 and report["violations"] == []


def test_verify_json_is_deterministic(capsys):
    args = ["verify", "spectrum-lattice", "--sample", "100", "--seed", "3", "--format", "json"]
    first = json.loads(run(capsys, *args)[1])
    second = json.loads(run(capsys, *args)[1])
    first.pop("seconds"), second.pop("seconds")
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spectrumkit", "chi", "--sem", "S", "--alphabet", "a,b", "a.0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "<a>tt"


def test_verdict_reports_instability_one_level_deeper(capsys):
    assert main(["verdict", "--sem", "CS", "--alphabet", "a,b", "<a>tt", "--format", "json"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["verdict"] == "characteristic"
    assert record["stableAtNextDepth"] is False
    assert main(["verdict", "--sem", "CS", "--alphabet", "a,b", "<a>tt"]) == 0
    assert "[changes at depth 2]" in capsys.readouterr().out
