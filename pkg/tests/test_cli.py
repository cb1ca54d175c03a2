import json
from fractions import Fraction

import pytest

from primehasse import cli, counterex, density, search, singular
from primehasse.cli import run, to_jsonable
from primehasse.locals import Equation, chi_p, membership_Cprime


def doc(argv, code=0):
    res = run(argv)
    assert res.exit_code == code, res.payload
    return json.loads(res.payload)


def test_delta_payload():
    d = doc(["delta", "--s", "4", "--k", "2", "--p", "2"])
    assert d["schema"] == "primehasse.delta"
    assert d["result"]["delta"] == {"num": "7", "den": "60"}
    assert d["result"]["soluble_classes"] == 448


def test_paper_example_payload():
    r = doc(["paper-example"])["result"]
    got = {p: Fraction(int(v["delta"]["num"]), int(v["delta"]["den"])) for p, v in r["deltas"].items()}
    assert got == {"2": Fraction(7, 60), "3": Fraction(13, 40), "5": Fraction(31, 39), "7": Fraction(189, 200)}
    assert r["prefactor"] == {"num": "31899", "den": "1280000"}
    assert round(r["global_value"], 3) == 0.023
    assert r["soluble_classes_mod_8"] == 448 and r["p0"] == 11


def test_smallest_payload():
    d = doc(["smallest", "--a", "1,13,-1", "--k", "2"])
    assert d["solution"] == [2, 3, 11] and d["limit_source"] == "default"
    assert doc(["smallest", "--a", "4,-9", "--k", "2", "--limit", "10"])["solution"] == [3, 2]


def test_thin_adapters():
    eq = Equation(2, (1, 13, -1))
    assert doc(["chi", "--a", "1,13,-1", "--k", "2", "--p", "3"])["result"]["chi"] == to_jsonable(chi_p(eq, 3))
    assert doc(["member", "--a", "1,13,-1", "--k", "2"])["result"] == to_jsonable(membership_Cprime(eq))
    eq5 = Equation(2, (1, 1, 1, 1, -4))
    assert doc(["series", "--a", "1,1,1,1,-4", "--k", "2", "--prime-bound", "30"])["result"] == \
        to_jsonable(singular.singular_series(eq5, 30))
    assert doc(["integral", "--a", "1,1,-1", "--k", "2"])["result"] == \
        to_jsonable(singular.singular_integral(Equation(2, (1, 1, -1))))
    assert doc(["search", "--a", "1,-1", "--k", "2", "--B", "100"])["result"] == \
        to_jsonable(search.count_prime_solutions(Equation(2, (1, -1)), 100))
    assert doc(["search", "--a", "1,1,-2", "--k", "2", "--B", "50", "--window-psi", "1"])["result"] == \
        to_jsonable(search.count_prime_solutions(Equation(2, (1, 1, -2)), 50, search.window_cutoff(50, 1)))
    assert doc(["global-density", "--s", "4", "--k", "2", "--prime-bound", "30"])["result"] == \
        to_jsonable(density.global_density(4, 2, 30))
    assert doc(["inhom", "--a", "1,1", "--n", "13", "--k", "2", "--B", "10"])["result"] == \
        to_jsonable(search.solve_inhomogeneous((1, 1), 13, 2, 10))
    assert doc(["converse", "--a", "1,13,-1", "--k", "2", "--lambda", "0.1", "--B", "50"])["result"] == \
        to_jsonable(search.check_partial_converse(eq, 0.1, 50))
    assert doc(["msq", "--s", "5", "--k", "2", "--A", "1", "--B", "20"])["result"] == \
        to_jsonable(search.mean_square_experiment(5, 2, 1, 20))


def test_empirical_independent_of_threads():
    one = doc(["--threads", "1", "empirical", "--s", "4", "--k", "2", "--A", "6"])
    two = doc(["--threads", "3", "empirical", "--s", "4", "--k", "2", "--A", "6"])
    assert one == two
    assert one["result"]["members"] == density.empirical_cprime_density(4, 2, 6)[0]


def test_deterministic_payloads():
    for argv in (["paper-example"], ["member", "--a", "1,1,1,-3", "--k", "2"],
                 ["counterexample", "pythag"]):
        assert run(argv).payload == run(argv).payload


def test_csv_outputs(tmp_path):
    path = tmp_path / "d.csv"
    doc(["global-density", "--s", "4", "--k", "2", "--prime-bound", "20", "--csv", str(path)])
    assert path.read_text().splitlines()[1] == "2,7,64,7,60,brute"
    path = tmp_path / "m.csv"
    doc(["msq", "--s", "5", "--k", "2", "--A", "1", "--B", "20", "--csv", str(path)])
    assert path.read_text().splitlines()[0] == "a_1,a_2,a_3,a_4,a_5,rho,prediction,sq_error"


def test_certificate_round_trip(tmp_path):
    path = tmp_path / "cert.json"
    built = doc(["counterexample", "pythag", "--triple", "3,4,5", "--r", "85", "--out", str(path)])
    assert built["certificate"] == cli.to_jsonable(counterex.cert_to_dict(
        counterex.build_pythag_counterexample(counterex.PythagoreanTriple(3, 4, 5), 85)))
    v = doc(["verify", "--cert", str(path)])
    assert v["result"]["verified"] and v["result"]["unconditional"]
    fermat = doc(["counterexample", "fermat", "--k", "3"])
    assert fermat["certificate"]["conditional_on_flt"] is True


def test_rejections_exit_one(tmp_path):
    d = doc(["counterexample", "blocked", "--b", "1,1,-1", "--literal"], code=1)
    assert d["kind"] == "rejected" and d["witness"] == [2, 3, 5]
    cert = counterex.cert_to_dict(counterex.claimed_counterexample(Equation(2, (1, 13, -1)), 20))
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cert))
    d = doc(["verify", "--cert", str(path)], code=1)
    assert d["schema"] == "primehasse.error"
    assert any(f[0] == "locally soluble everywhere" for f in d["failures"])


def test_error_codes(monkeypatch):
    assert doc(["delta", "--s", "2", "--k", "2", "--p", "3"], code=1)["kind"] == "domain"
    assert doc(["chi", "--a", "1,0", "--k", "2", "--p", "3"], code=1)["kind"] == "domain"
    assert doc(["nope"], code=3)["kind"] == "usage"
    assert doc(["chi", "--a", "1e3,2", "--k", "2", "--p", "3"], code=3)["kind"] == "usage"
    assert doc(["verify", "--cert", "/nonexistent.json"], code=1)["kind"] == "domain"
    monkeypatch.setenv("PHL_BUDGET", "50")
    d = doc(["search", "--a", "1,1,1,-1", "--k", "2", "--B", "500"], code=2)
    assert d["kind"] == "resource" and "exceeds budget 50" in d["message"]


def test_main_prints_json(capsys):
    assert cli.main(["delta", "--s", "4", "--k", "2", "--p", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"]["delta"] == {"num": "13", "den": "40"}
