"""Run the CLI on quick configs and validate every summary.json and CSV header."""
import csv
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.loads(pathlib.Path(schema_path).read_text())
jsonschema.Draft202012Validator.check_schema(schema)

quick = {
    "sync": "engine: {sim_duration: 900}\nattack: {bs_values: [0, 60]}\n",
    "sync_dur": "engine: {sim_duration: 900}\n",
    "distribution": "engine: {sim_duration: 900}\n",
    "corr_exp1": "",
    "no_attack": "",
    "ml_features": "engine: {sim_duration: 900}\ndetect: {ml: {n_trees: 5, feature_sizes: [5, 10], train_runs: 1, test_runs: 1}}\n",
}

expected_headers = {
    "links.csv": ["t", "link_id", "offered_bps", "utilization", "flow_count", "label"],
    "corr.csv": ["t", "mean_r", "n_valid_pairs"],
    "study_feature_count.csv": ["config", "seed", "auc"],
}

with tempfile.TemporaryDirectory() as tmp:
    for name, text in quick.items():
        out = pathlib.Path(tmp) / name
        cfg = pathlib.Path(tmp) / f"{name}.yaml"
        cfg.write_text(text)
        subprocess.run([cli, "run", name, "--config", str(cfg), "--seeds", "1-2", "--out", str(out)],
                       check=True, stdout=subprocess.DEVNULL)
        summary = json.loads((out / "summary.json").read_text())
        jsonschema.validate(summary, schema)
        assert summary["experiment"] == name
        assert summary["measurements"], name
        for path in out.rglob("*.csv"):
            with path.open() as f:
                header = next(csv.reader(f))
            if path.name in expected_headers:
                assert header == expected_headers[path.name], (path, header)
        print(f"{name}: summary.json valid, {len(summary['measurements'])} measurements")

    # A document that breaks the schema must be rejected.
    bad = {"experiment": "sync", "seeds": [1], "measurements": [{"scenario": "x", "seed": 1, "metric": "m"}]}
    try:
        jsonschema.validate(bad, schema)
    except jsonschema.ValidationError:
        print("malformed summary rejected")
    else:
        sys.exit("schema accepted a measurement without a value")
