import json

from harness.cli import main
from harness.datasets import load_csv


def test_generate_then_induce(tmp_path):
    data_path = tmp_path / "synth.csv"
    assert main(["generate-data", "--n-rows", "60", "--n-features", "4", "--out", str(data_path)]) == 0
    assert load_csv(data_path).shape == (60, 4)

    masked_path = tmp_path / "masked.csv"
    assert main(["induce-missingness", "--data", str(data_path), "--rate", "0.25", "--seed", "2",
                 "--out", str(masked_path)]) == 0
    assert 0.1 < load_csv(masked_path).missing_fraction < 0.4


def test_impute_and_evaluate(tmp_path, capsys):
    data_path = tmp_path / "synth.csv"
    masked_path = tmp_path / "masked.csv"
    imputed_path = tmp_path / "imputed.csv"
    main(["generate-data", "--n-rows", "90", "--n-features", "3", "--out", str(data_path)])
    main(["induce-missingness", "--data", str(data_path), "--out", str(masked_path)])

    config_path = tmp_path / "impute.json"
    config_path.write_text(json.dumps({"n_iterations": 1, "forest": {"n_trees": 3, "batch_size": 45}}))
    assert main(["impute", "--data", str(masked_path), "--config", str(config_path),
                 "--sampler", "detdpp", "--out", str(imputed_path)]) == 0
    assert load_csv(imputed_path).mask.all()

    capsys.readouterr()
    assert main(["evaluate", "--data", str(imputed_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload["holdouts"]) == {"H1", "H2", "H3"}


def test_evaluate_rejects_missing_cells(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("a,outcome\n1,0\n,1\n")
    assert main(["evaluate", "--data", str(path)]) == 1


def test_missing_file_fails_cleanly(tmp_path):
    assert main(["impute", "--data", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.csv")]) == 1


def test_dpp_sample_greedy(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    path.write_text("a,b,outcome\n0,0,0\n0,0,1\n1,0,0\n0,1,1\n")
    capsys.readouterr()
    assert main(["dpp-sample", "--data", str(path), "--k", "2", "--mode", "greedy"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["subset"]) == 2
    assert sorted(payload["subset"]) != [0, 1]


def test_dpp_sample_counts(tmp_path, capsys):
    path = tmp_path / "synth.csv"
    main(["generate-data", "--n-rows", "30", "--n-features", "3", "--out", str(path)])
    capsys.readouterr()
    assert main(["dpp-sample", "--data", str(path), "--rows", "8", "--k", "2", "--n-samples", "50"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sum(entry["count"] for entry in payload["samples"]) == 50


def test_qdpp_simulate(tmp_path, capsys):
    circuit_path = tmp_path / "circuit.json"
    capsys.readouterr()
    assert main(["qdpp-simulate", "--n", "5", "--d", "2", "--shots", "200",
                 "--circuit-out", str(circuit_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["resources"]["depth"] > 0
    assert sum(entry["count"] for entry in payload["counts"]) == 200
    assert all(len(entry["subset"]) == 2 for entry in payload["counts"])
    assert len(payload["exact_mode"]) == 2
    assert json.loads(circuit_path.read_text())["n_qubits"] == 5


def test_benchmark_writes_reports(tmp_path):
    config_path = tmp_path / "bench.json"
    config_path.write_text(json.dumps({
        "experiment": {
            "dataset": {"n_rows": 90, "n_features": 3, "n_informative": 3},
            "impute": {"n_iterations": 1, "forest": {"n_trees": 2, "batch_size": 45}},
            "classifier": {"n_rounds": 5},
            "repeats": 1,
        },
        "missingness": [{"kind": "mcar", "rate": 0.2}],
        "methods": [["missforest", "uniform"]],
    }))
    out_dir = tmp_path / "reports"
    assert main(["benchmark", "--config", str(config_path), "--out-dir", str(out_dir)]) == 0
    assert (out_dir / "bench_auc.csv").exists()
    assert (out_dir / "bench_rmse.json").exists()
