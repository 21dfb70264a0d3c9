import csv

import numpy as np
import pytest

from gcho.bench import (
    CERT_COLUMNS,
    SUMMARY_COLUMNS,
    TRACE_COLUMNS,
    main,
    resolve_problem,
)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def strip_wall(rows):
    """Drop the wall_ms column (hardware noise) from trace rows."""
    idx = rows[0].index("wall_ms")
    return [[c for j, c in enumerate(r) if j != idx] for r in rows]


class TestResolve:
    def test_form_suffix(self):
        assert resolve_problem("mgh01", "ls").name == "mgh01:ls"
        assert resolve_problem("mgh01", None).name == "mgh01:minmax"

    def test_direct_names(self):
        assert resolve_problem("toymax", None).name == "toymax"
        assert resolve_problem("mgh05:ls", "minmax").name == "mgh05:ls"


class TestCliRun:
    def test_mgh01_minmax(self, tmp_path):
        out = tmp_path / "r1"
        code = main([
            "run", "--problem", "mgh01", "--form", "minmax", "--p", "2",
            "--out", str(out), "--no-plot",
        ])
        assert code == 0
        rows = read_csv(out / "trace.csv")
        assert rows[0] == TRACE_COLUMNS
        summary = read_csv(out / "summary.csv")
        assert summary[0] == SUMMARY_COLUMNS
        final_x = np.array([float(v) for v in summary[1][5].split(";")])
        assert np.max(np.abs(final_x - 1.0)) <= 1e-2
        assert summary[1][6] == "StepTol"
        assert (out / "manifest.json").exists()

    def test_toymax_certificates_decay(self, tmp_path):
        out = tmp_path / "r2"
        code = main([
            "run", "--problem", "toymax", "--p", "1", "--certify", "1",
            "--out", str(out), "--no-plot",
        ])
        assert code == 0
        rows = read_csv(out / "certificates.csv")
        assert rows[0] == CERT_COLUMNS
        sf = [float(r[2]) for r in rows[1:]]
        assert sf[-1] <= 1e-3

    def test_cvx_ls_rate_check(self, tmp_path):
        out = tmp_path / "r3"
        code = main([
            "run", "--problem", "cvx-ls", "--p", "2", "--rate-check",
            "--out", str(out), "--no-plot",
        ])
        assert code == 0
        rows = read_csv(out / "rate.csv")
        assert rows[1][-1] == "True"

    def test_unknown_problem_exits_2(self, tmp_path):
        assert main(["run", "--problem", "mgh99", "--no-plot"]) == 2

    def test_bad_flag_exits_2(self):
        assert main(["run", "--problem", "mgh01", "--p", "7"]) == 2

    def test_plots_rendered_by_default(self, tmp_path):
        out = tmp_path / "r4"
        code = main([
            "run", "--problem", "cvx-ls", "--p", "2", "--certify", "1",
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "fig_convergence.png").stat().st_size > 0
        assert (out / "fig_certificates.png").stat().st_size > 0

    def test_determinism_modulo_wall_ms(self, tmp_path):
        args = [
            "run", "--problem", "mgh05", "--form", "minmax", "--p", "2",
            "--seed", "3", "--no-plot",
        ]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        t1 = strip_wall(read_csv(out1 / "trace.csv"))
        t2 = strip_wall(read_csv(out2 / "trace.csv"))
        assert t1 == t2
        assert read_csv(out1 / "certificates.csv") == read_csv(out2 / "certificates.csv")


@pytest.fixture(scope="module")
def table_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("table")
    code = main(["table1", "--out", str(out), "--no-plot"])
    return code, out


class TestCliTable1:
    def test_exit_code_and_files(self, table_out):
        code, out = table_out
        assert code == 0
        rows = read_csv(out / "table1.csv")
        assert len(rows) == 7  # header + 6 gated problems
        assert (out / "mgh01-minmax" / "trace.csv").exists()

    def test_final_x_near_known_solutions(self, table_out):
        _, out = table_out
        from gcho.problem import registry_lookup

        summary = read_csv(out / "summary.csv")
        for row in summary[1:]:
            name, form = row[0], row[1]
            spec = registry_lookup(f"{name}:{form}")
            x = np.array([float(v) for v in row[5].split(";")])
            err = min(
                np.max(np.abs(x - s)) / (1.0 + np.linalg.norm(s))
                for s in spec.known_solutions
            )
            assert err <= 1e-2, f"{name}:{form} landed at {x}"

    def test_majority_iteration_ratio(self, table_out):
        _, out = table_out
        rows = read_csv(out / "table1.csv")
        wins = sum(1 for r in rows[1:] if int(r[1]) <= int(r[4]))
        assert wins >= 4
