import json
import pathlib

import pytest

jsonschema = pytest.importorskip("jsonschema")
import referencing
import referencing.jsonschema

import momentalign
from momentalign.cli import main
from momentalign.datasets import ArtificialSpec
from momentalign.distances import cmd_estimate
from momentalign.verify import check_gradients

SCHEMA_DIR = pathlib.Path(momentalign.__file__).parent / "schemas"
NAMES = [
    "distance-report",
    "bound-checks",
    "artificial-spec",
    "run-config",
    "sweep-config",
    "run-report",
]


def load_schemas():
    docs = {}
    for name in NAMES:
        docs[name] = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
    return docs


def registry(docs):
    resources = [
        (doc["$id"], referencing.Resource.from_contents(doc))
        for doc in docs.values()
    ]
    return referencing.Registry().with_resources(resources)


@pytest.fixture(scope="module")
def validators():
    docs = load_schemas()
    reg = registry(docs)
    return {
        name: jsonschema.Draft202012Validator(doc, registry=reg)
        for name, doc in docs.items()
    }


def test_all_schema_files_ship_and_are_valid():
    docs = load_schemas()
    assert len(docs) == 6
    for name, doc in docs.items():
        jsonschema.Draft202012Validator.check_schema(doc)
        assert doc["$id"] == f"momentalign/{name}"


def test_distance_report_instances(validators):
    v = validators["distance-report"]
    v.validate(cmd_estimate([[0.0], [1.0]], [[0.25], [0.75]]).to_dict())
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"metric": "cmd", "value": -1.0, "terms": []})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"metric": "cmd", "value": 1.0, "terms": [], "extra": 1})


def test_distance_cli_output_validates(validators, tmp_path, capsys):
    src = tmp_path / "a.csv"
    src.write_text("f1\n0.0\n1.0\n")
    assert main(["distance", "--metric", "cmd", "--source", str(src),
                 "--target", str(src)]) == 0
    out = capsys.readouterr().out
    validators["distance-report"].validate(json.loads(out))


def test_bound_checks_instances(validators):
    v = validators["bound-checks"]
    rows = [r.to_dict() for r in check_gradients(cases=2)]
    v.validate(rows)
    with pytest.raises(jsonschema.ValidationError):
        v.validate([{"name": "x", "lhs": 0, "rhs": 1, "slack": 1}])


def test_artificial_spec_instances(validators):
    v = validators["artificial-spec"]
    v.validate(ArtificialSpec().to_dict())
    v.validate(ArtificialSpec(spread=(0.1, 0.2, 0.3)).to_dict())
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"spread": 0.0})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"total": 0})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"blobs": 3})


def test_run_config_instances(validators):
    v = validators["run-config"]
    v.validate({
        "train": {"hidden": 8, "lambda": 1.0, "optimizer": "adadelta"},
        "artificial": {"total": 100},
        "out": "results",
    })
    v.validate({"source": "a.csv", "target": "b.csv", "format": "sparse"})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"train": {"momentum": 0.9}})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"train": {"optimizer": "adam"}})
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"format": "parquet"})


def test_sweep_config_instances(validators):
    v = validators["sweep-config"]
    v.validate({
        "train": {"k": 3},
        "artificial": {"total": 60},
        "ks": [1, 3, 5],
        "lambdas": [0.0, 1.0],
        "out": "sweep.csv",
    })
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"lambdas": [1.0]})  # ks missing
    with pytest.raises(jsonschema.ValidationError):
        v.validate({"ks": [], "lambdas": [1.0]})


def test_run_report_instances(validators, tmp_path, capsys):
    doc = {
        "artificial": {"total": 60, "seed": 3},
        "train": {"hidden": 4, "epochs": 4, "seed": 3},
        "out": str(tmp_path / "t"),
    }
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(doc))
    assert main(["train", "--config", str(cfg)]) == 0
    capsys.readouterr()
    report = json.loads((tmp_path / "t" / "report.json").read_text())
    validators["run-report"].validate(report)

    doc["out"] = str(tmp_path / "w")
    cfg.write_text(json.dumps(doc))
    assert main(["warm-start", "--config", str(cfg)]) == 0
    capsys.readouterr()
    ws_report = json.loads((tmp_path / "w" / "report.json").read_text())
    validators["run-report"].validate(ws_report)

    with pytest.raises(jsonschema.ValidationError):
        validators["run-report"].validate({"command": "train"})
