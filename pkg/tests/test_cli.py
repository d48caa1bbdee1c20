"""End-to-end tests of the batch front-end."""

import json


from ellpoisson.cli import main


def run(args, tmp_path, name="out.json"):
    path = tmp_path / name
    code = main(args + ["--output", str(path)])
    return code, path.read_text()


class TestExitCodes:
    def test_theta_passes(self, tmp_path):
        code, _ = run(["theta", "--n", "3", "--tau", "0", "1"], tmp_path)
        assert code == 0

    def test_bad_tau_is_usage_error(self, capsys):
        code = main(["theta", "--tau", "0", "-1"])
        assert code == 2
        assert "Im(tau) must be positive" in capsys.readouterr().err

    def test_non_coprime_rejected(self, capsys):
        code = main(["sklyanin", "--n", "4", "--k", "2"])
        assert code == 2
        assert "gcd(n,k) must be 1" in capsys.readouterr().err

    def test_moduli_compare_rejects_k2(self, capsys):
        code = main(["moduli-compare", "--k", "2"])
        assert code == 2
        assert "only established for k = 1" in capsys.readouterr().err

    def test_sign_flip_fails_with_named_identity(self, tmp_path):
        code, text = run(["homology", "--n", "3", "--samples", "1",
                          "--seed", "1", "--inject-sign-flip"], tmp_path)
        assert code == 1
        report = json.loads(text)
        assert "chain-map square" in report["tables"]["failures"][0][1]


class TestReports:
    def test_json_schema(self, tmp_path):
        code, text = run(["sklyanin", "--n", "3", "--k", "1"], tmp_path)
        assert code == 0
        report = json.loads(text)
        assert set(report) == {"command", "params", "checks", "tables",
                               "elapsed_ms"}
        for check in report["checks"]:
            assert set(check) == {"name", "residual", "tolerance", "pass"}

    def test_csv_layout(self, tmp_path):
        code, text = run(["theta", "--n", "3", "--format", "csv"], tmp_path,
                         "out.csv")
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0] == "name,residual,tolerance,pass"
        assert all(line.count(",") == 3 for line in lines[1:])
        assert all(line.endswith("true") for line in lines[1:])

    def test_leaves_table(self, tmp_path):
        code, text = run(["leaves", "--n", "3"], tmp_path)
        assert code == 0
        report = json.loads(text)
        tagged = [tuple(row[:1] + row[3:4]) for row in
                  report["tables"]["strata"] if row[5]]
        assert sorted(tagged) == [(0, 6), (1, 4), (2, 0), (2, 2), (3, 0)]

    def test_leaves_n1(self, tmp_path):
        code, text = run(["leaves", "--n", "1"], tmp_path)
        assert code == 0
        rows = json.loads(text)["tables"]["strata"]
        assert [(r[0], r[3]) for r in rows] == [(0, 2), (1, 0)]

    def test_homology_vacuous_pass_warns(self, tmp_path):
        code, text = run(["homology", "--samples", "0"], tmp_path)
        assert code == 0
        report = json.loads(text)
        assert "warning" in report["tables"]
        assert report["checks"] == []

    def test_sklyanin_k2_has_no_f_row(self, tmp_path):
        code, text = run(["sklyanin", "--n", "5", "--k", "2"], tmp_path)
        assert code == 0
        report = json.loads(text)
        names = [c["name"] for c in report["checks"]]
        assert "canonical_form_equals_f_table" not in names
        assert "jacobi_defect" in names


class TestDeterminism:
    @staticmethod
    def strip_elapsed(text):
        report = json.loads(text)
        report.pop("elapsed_ms")
        return json.dumps(report, sort_keys=True)

    def test_identical_seed_identical_payload(self, tmp_path):
        args = ["moduli-compare", "--n", "3", "--samples", "4", "--seed", "7"]
        code1, text1 = run(args, tmp_path, "a.json")
        code2, text2 = run(args, tmp_path, "a.json")
        assert code1 == code2 == 0
        assert self.strip_elapsed(text1) == self.strip_elapsed(text2)

    def test_different_seed_changes_payload(self, tmp_path):
        base = ["moduli-compare", "--n", "3", "--samples", "4"]
        _, text1 = run(base + ["--seed", "1"], tmp_path, "a.json")
        _, text2 = run(base + ["--seed", "2"], tmp_path, "b.json")
        assert self.strip_elapsed(text1) != self.strip_elapsed(text2)

    def test_env_tolerance_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ELLPOISSON_TOL", "1e-30")
        code, text = run(["theta", "--n", "3"], tmp_path)
        assert code == 1  # nothing passes a 1e-30 tolerance
        report = json.loads(text)
        assert report["params"]["tol"] == 1e-30

    def test_env_truncation_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ELLPOISSON_TRUNCATION_EPS", "1e-9")
        code, text = run(["theta", "--n", "3"], tmp_path)
        assert code == 0
        assert json.loads(text)["params"]["truncation_eps"] == 1e-9

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ELLPOISSON_TOL", "1e-30")
        code, text = run(["theta", "--n", "3", "--tol", "1e-8"], tmp_path)
        assert code == 0
        assert json.loads(text)["params"]["tol"] == 1e-8
