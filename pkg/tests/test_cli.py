import httpx
import pytest
from fastapi.testclient import TestClient

from mcmopt.cli import EXIT_FAILED, EXIT_OK, EXIT_STAGE, main
from mcmopt.io import from_exchange
from mcmopt.service.app import create_app

solver = pytest.mark.solver


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def one_bit_total(text: str) -> int:
    line = next(l for l in text.splitlines() if l.startswith("one-bit"))
    return int(line.split("structural")[1])


@solver
def test_solve_tmcm(capsys, tmp_path):
    code, out, _ = run(
        capsys, "--constants", "49,51", "--metric", "tmcm", "--wordlength-in", "3", "--error", "0.5ulp@3", "--out", str(tmp_path)
    )
    assert code == EXIT_OK
    assert one_bit_total(out) <= 4 and "simulation     exhaustive" in out
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["graph.dot", "graph.mcm", "model.lp", "report.txt", "solution.sol"]


@solver
def test_solve_adders_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", "--constants", "7,19,31", "--metric", "adders", "--out", str(tmp_path), "--emit", "exchange,report")
    assert code == EXIT_OK and "adders (N_A)   3" in out
    assert not (tmp_path / "graph.dot").exists()
    code, out, _ = run(capsys, "verify", str(tmp_path / "graph.mcm"))
    assert code == EXIT_OK and "verified       yes" in out


def test_trivial(capsys):
    code, out, _ = run(capsys, "--constants", "1", "--metric", "adders")
    assert code == EXIT_OK and "adders (N_A)   0" in out and "analytic 0, structural 0" in out


def test_verify_rejects_even_fundamental(capsys, tmp_path):
    path = tmp_path / "g.mcm"
    path.write_text("I(3;7) A(6;1,2,+;1,0,+;0;0,0;1) O(6;6;0;0)\n")
    code, _, err = run(capsys, "verify", str(path))
    assert code == EXIT_STAGE and "[parse]" in err and "not odd" in err


def test_verify_budget_margin(capsys, tmp_path):
    path = tmp_path / "g.mcm"
    path.write_text("I(4;15) A(9;1,3,+;1,0,+;0;0,3;1) O(9;9;0;0)\n")
    code, out, _ = run(capsys, "verify", str(path), "--error", "6")
    assert code == EXIT_FAILED
    assert "budget      6 interval [-7, 0]" in out and "FAIL" in out


def test_cost_table(capsys, tmp_path):
    path = tmp_path / "g.mcm"
    path.write_text("I(3;7) A(7;1,3,+;1,0,-;0;0,0;1) O(7;7;0;0)\n")
    code, out, _ = run(capsys, "cost", str(path))
    assert code == EXIT_OK and "analytic 6, structural 6" in out


def test_emit_to_dir(capsys, tmp_path):
    code, out, _ = run(capsys, "emit", "--constants", "7", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert (tmp_path / "model.lp").read_text().startswith("\\ mcm_adders")
    assert (tmp_path / "start.mst").exists() and "variables=" in out


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--constants", "7,19,31")
    assert code == EXIT_OK and "optimum adders  3" in out
    witness = out.split("witness")[1].strip()
    assert len(from_exchange(witness).nodes) == 3


@pytest.mark.parametrize(
    "argv, stage",
    [
        (["--constants", "7", "--metric", "tmcm"], "[normalize]"),
        (["--constants", "7", "--metric", "bits", "--wordlength-in", "3", "--error", "0.5ulp"], "[normalize]"),
        (["--constants", "49,51", "--metric", "adders-ad", "--ad-bound", "1"], None),
        (["oracle", "--constants", "45", "--max-adders", "1"], "[oracle]"),
        (["verify", "/nonexistent/graph.mcm"], "[parse]"),
    ],
)
def test_failures(capsys, argv, stage):
    code, out, err = run(capsys, *argv)
    assert code != EXIT_OK
    if stage:
        assert stage in err
    else:
        assert "status         infeasible" in out


def test_bad_flags(capsys):
    with pytest.raises(SystemExit):
        main(["--constants", "seven"])
    with pytest.raises(SystemExit):
        main(["solve", "--constants", "7", "--emit", "pdf"])


@pytest.fixture
def served(monkeypatch):
    client = TestClient(create_app())

    def post(url, json=None, timeout=None):
        path = "/" + url.split("/", 3)[3]
        return client.post(path, json=json)

    monkeypatch.setattr(httpx, "post", post)
    return client


@solver
def test_server_mode(capsys, tmp_path, served):
    code, out, _ = run(capsys, "--constants", "7,19,31", "--server", "http://svc:8000", "--out", str(tmp_path))
    assert code == EXIT_OK and "adders (N_A)   3" in out
    assert sorted(p.name for p in tmp_path.iterdir()) == ["graph.dot", "graph.mcm", "report.txt"]


def test_server_mode_errors(capsys, served):
    code, _, err = run(capsys, "--constants", "7", "--metric", "tmcm", "--server", "http://svc:8000")
    assert code == EXIT_STAGE and "[normalize]" in err
    code, out, _ = run(capsys, "oracle", "--constants", "45", "--server", "http://svc:8000", "--json")
    assert code == EXIT_OK and '"optimum_adders": 2' in out


def test_server_unreachable(capsys):
    code, _, err = run(capsys, "oracle", "--constants", "7", "--server", "http://127.0.0.1:9")
    assert code == EXIT_STAGE and "[server]" in err
