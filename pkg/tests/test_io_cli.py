import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given

from conftest import general_instances, network_instances
from emms.cli import main
from emms.errors import ParseError
from emms.fixtures import figure1_instance
from emms.io import (
    allocation_from_dict,
    allocation_to_dict,
    instance_from_dict,
    instance_to_dict,
    parse_instance,
    write_instance,
)
from emms.claiming import run_bc


@given(network_instances())
def test_network_round_trip(inst):
    assert instance_from_dict(json.loads(json.dumps(instance_to_dict(inst)))) == inst


@given(general_instances(n_max=3, m_max=3))
def test_general_round_trip(inst):
    assert instance_from_dict(json.loads(json.dumps(instance_to_dict(inst)))) == inst


def test_decimal_and_number_inputs():
    inst = instance_from_dict({"values": [[1, "2.5"], ["1/3", 0]], "weights": [[0.75, "1/4"], ["0", 1]]})
    assert inst.values[0][1] == Fraction(5, 2)
    assert inst.weights[0][0] == Fraction(3, 4)


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"values": [[1]], "weights": [["x"]]}, "weights[0][0]"),
        ({"values": [[1]]}, "weights: missing"),
        ({"values": [[1]], "weights": [[1]], "model": "other"}, "model"),
        ({"values": [[1]], "weights": [["0.5"]]}, "UnnormalizedWeights"),
        ({"values": [[1]], "weights": [[1]], "n": 2}, "n: declared"),
        ({"values": [1], "weights": [[1]]}, "values[0]"),
        ([], "instance"),
    ],
)
def test_parse_errors_name_the_field(data, fragment):
    with pytest.raises(ParseError) as info:
        instance_from_dict(data)
    assert fragment in str(info.value)


def test_bad_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"values": [[1]],\n "weights": [[1]')
    with pytest.raises(ParseError) as info:
        parse_instance(path)
    assert f"{path}:2:" in str(info.value)


def test_allocation_utilities_recomputed():
    inst = figure1_instance()
    allocation, _ = run_bc(inst)
    data = allocation_to_dict(allocation, alpha=Fraction(1, 2))
    data["utilities"] = ["999"] * inst.n
    back, meta = allocation_from_dict(data, inst)
    assert back == allocation
    assert meta == {"alpha": "1/2"}


@pytest.fixture
def figure_file(tmp_path):
    path = tmp_path / "fig.json"
    write_instance(figure1_instance(), path)
    return path


def test_cli_emms(figure_file, capsys):
    assert main(["emms", str(figure_file)]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 5 and rows[0]["exact"] is True


def test_cli_allocate_then_verify(figure_file, tmp_path, capsys):
    out = tmp_path / "alloc.json"
    for strategy in ("bc-exact", "bc-lpt"):
        assert main(["allocate", str(figure_file), "--strategy", strategy, "--out", str(out)]) == 0
        assert main(["verify", str(figure_file), str(out)]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert all(r["passed"] == "True" for r in rows)
    assert main(["verify", str(figure_file), str(out), "--alpha", "50"]) == 1


def test_cli_trace(figure_file, capsys):
    assert main(["trace", str(figure_file), "--mode", "lpt"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["source"] == "lpt"
    assert "allocation" in data


def test_cli_cut_and_choose_wrong_count(figure_file, capsys):
    assert main(["allocate", str(figure_file), "--strategy", "cut-and-choose"]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_missing_file(tmp_path, capsys):
    assert main(["emms", str(tmp_path / "nope.json")]) == 2


def test_cli_bad_instance(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"values": [[1, -2]], "weights": [[1]]}')
    assert main(["emms", str(path)]) == 2
    assert "NegativeValue" in capsys.readouterr().err


def test_cli_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["bench", "--n", "two"])
    assert info.value.code == 2


def test_cli_gen_directory_and_single(tmp_path):
    outdir = tmp_path / "many"
    assert main(["gen", "--count", "3", "--out", str(outdir)]) == 0
    assert len(list(outdir.glob("instance_*.json"))) == 3
    single = tmp_path / "one.json"
    assert main(["gen", "--seed", "4", "--out", str(single)]) == 0
    assert parse_instance(single).n >= 2


def test_cli_bench(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["bench", "--count", "6", "--strategy", "bc-exact", "--strategy", "bc-lpt", "--out", str(out)])
    assert code == 0
    assert out.read_text().startswith("# emms-report schema=1\n")
    summary = json.loads(capsys.readouterr().err)
    assert summary["bc-exact"]["violations"] == 0


def test_module_entry_point(figure_file):
    proc = subprocess.run([sys.executable, "-m", "emms", "emms", str(figure_file), "--mode", "lpt"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)[0]["exact"] is False
