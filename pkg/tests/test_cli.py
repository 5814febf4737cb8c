from fractions import Fraction

import pytest

from conftest import WORKED_CLOSED, WORKED_STRONG, WORKED_SYSTEM, WORKED_SYSTEM_TEXT, INT
from octclose.cli import ParseError, UnknownVariable, main, parse_constraint, parse_system
from octclose.dbm import Dbm, OctConstraint

RUNNING_TEXT = """vars 2
x0 <= 7
x1 <= 0
x0 - x1 <= 7
x0 + x1 <= 0
"""


def csv(rows):
    return "".join(",".join("inf" if v == float("inf") else str(v) for v in r) + "\n" for r in rows)


@pytest.fixture
def write(tmp_path):
    def _write(text, name="sys.txt"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestParse:
    def test_worked_system_system(self):
        n, cs = parse_system(WORKED_SYSTEM_TEXT)
        assert n == 2 and cs == WORKED_SYSTEM

    def test_unary(self):
        assert parse_constraint("x0 <= 3", 1) == OctConstraint.unary(1, 0, 3)

    def test_rational_constant(self):
        assert parse_constraint("-x1 + x0 <= 7/2", 2) == OctConstraint.binary(-1, 1, 1, 0, Fraction(7, 2))

    def test_comments_and_blank_lines(self):
        n, cs = parse_system("# header\nvars 1\n\nx0 <= 1  # trailing\n")
        assert n == 1 and len(cs) == 1

    def test_missing_constant(self):
        with pytest.raises(ParseError) as err:
            parse_system("x0 <= ")
        assert err.value.line == 1

    def test_missing_constant_after_header(self):
        with pytest.raises(ParseError) as err:
            parse_system("vars 1\nx0 <= \n")
        assert err.value.line == 2

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable) as err:
            parse_system("vars 1\nx0 + x1 <= 3\n")
        assert err.value.line == 2

    @pytest.mark.parametrize("text", ["vars 1\nx0 <= inf\n", "vars 2\nx0 - x0 <= 1\n", "vars 0\n", "", "vars 1\nvars 1\n"])
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_system(text)

    def test_non_integer_in_int_mode(self):
        with pytest.raises(ParseError):
            parse_system("vars 1\nx0 <= 1/2\n", INT)


class TestClose:
    def test_fw_gives_closed_matrix(self, capsys, write):
        code, out, _ = run(capsys, "close", write(WORKED_SYSTEM_TEXT), "--algo", "fw")
        assert code == 0 and out == csv(WORKED_CLOSED)

    def test_strong_on_compact_backend(self, capsys, write):
        code, out, _ = run(capsys, "close", write(WORKED_SYSTEM_TEXT), "--backend", "codbm")
        assert code == 0 and out == csv(WORKED_STRONG)

    def test_unsat(self, capsys, write):
        code, out, _ = run(capsys, "close", write("vars 1\nx0 <= 0\n-x0 <= -1\n"))
        assert code == 2 and out == "UNSAT\n"

    def test_tight_needs_int(self, capsys, write):
        code, _, err = run(capsys, "close", write(WORKED_SYSTEM_TEXT), "--algo", "tight", "--mode", "rat")
        assert code == 1 and "int" in err

    def test_tight_int(self, capsys, write):
        code, out, _ = run(capsys, "close", write("vars 1\nx0 <= 7/1\n"), "--algo", "tight", "--mode", "int")
        assert code == 0 and out.splitlines()[0] == "0,14"

    def test_parse_error_exit(self, capsys, write):
        code, _, err = run(capsys, "close", write("vars 1\nx0 <=\n"))
        assert code == 1 and "line 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "close", str(tmp_path / "nope"))
        assert code == 1

    def test_out_file(self, capsys, write, tmp_path):
        out = tmp_path / "d.csv"
        assert run(capsys, "close", write(WORKED_SYSTEM_TEXT), "--out", str(out))[0] == 0
        assert Dbm.from_csv(out.read_text()).rows == WORKED_STRONG


class TestIncr:
    def test_running_example(self, capsys, write):
        code, out, _ = run(capsys, "incr", write(RUNNING_TEXT), "x0 - x1 <= 0")
        assert code == 0
        assert out.splitlines()[0].split(",")[1] == "0"

    @pytest.mark.parametrize("algo, count", [("incr", 64), ("strong", 76), ("hoist", 40), ("strong-reduce", 84)])
    def test_min_counts(self, capsys, write, algo, count):
        code, out, _ = run(capsys, "incr", write(RUNNING_TEXT), "x0 - x1 <= 0", "--algo", algo, "--count-mins")
        assert code == 0 and out.splitlines()[-1] == f"min_ops={count}"

    @pytest.mark.parametrize("algo", ["incr", "strong"])
    @pytest.mark.parametrize("order", ["rowmajor", "colmajor", "random:7"])
    def test_in_place_matches(self, capsys, write, algo, order):
        path = write(WORKED_SYSTEM_TEXT)
        _, expected, _ = run(capsys, "incr", path, "x0 - x1 <= 0", "--algo", algo)
        code, out, _ = run(capsys, "incr", path, "x0 - x1 <= 0", "--algo", algo, "--in-place", "--order", order)
        assert code == 0 and out == expected

    def test_tight_in_place_on_codbm(self, capsys, write):
        path = write(RUNNING_TEXT)
        _, expected, _ = run(capsys, "incr", path, "x1 - x0 <= -1", "--algo", "tight", "--mode", "int")
        code, out, _ = run(
            capsys, "incr", path, "x1 - x0 <= -1", "--algo", "tight", "--mode", "int",
            "--in-place", "--order", "random:1", "--backend", "codbm",
        )
        assert code == 0 and out == expected

    def test_unsat_addition(self, capsys, write):
        code, out, _ = run(capsys, "incr", write("vars 1\nx0 <= 0\n"), "-x0 <= -1", "--count-mins")
        assert code == 2 and out == "UNSAT\nmin_ops=0\n"

    def test_unsat_base(self, capsys, write):
        code, out, err = run(capsys, "incr", write("vars 1\nx0 <= 0\n-x0 <= -1\n"), "x0 <= 5")
        assert code == 2 and "unsatisfiable" in err

    @pytest.mark.parametrize(
        "extra",
        [
            ("--algo", "hoist", "--in-place"),
            ("--in-place", "--count-mins"),
            ("--algo", "tight"),
            ("--algo", "strong", "--mode", "int"),
            ("--in-place", "--order", "spiral"),
        ],
    )
    def test_usage_errors(self, capsys, write, extra):
        assert run(capsys, "incr", write(RUNNING_TEXT), "x0 <= 1", *extra)[0] == 1

    def test_bad_constraint(self, capsys, write):
        assert run(capsys, "incr", write(RUNNING_TEXT), "x7 <= 1")[0] == 1


class TestCheck:
    def test_flags(self, capsys, write):
        code, out, _ = run(capsys, "check", write(csv(WORKED_CLOSED), "d.csv"))
        assert code == 0
        assert "closed=true" in out.splitlines()
        assert "strongly_closed=false" in out.splitlines()

    def test_int_tight(self, capsys, write):
        code, out, _ = run(capsys, "check", write("0,6\ninf,0\n", "d.csv"), "--mode", "int")
        assert out.splitlines()[-1] == "tightly_closed=true"


class TestGenAndBench:
    def test_gen_is_deterministic_and_parses(self, capsys):
        _, a, _ = run(capsys, "gen", "--vars", "3", "--constraints", "5", "--seed", "9", "--trial", "2")
        _, b, _ = run(capsys, "gen", "--vars", "3", "--constraints", "5", "--seed", "9", "--trial", "2")
        assert a == b
        n, cs = parse_system(a)
        assert n == 3 and len(cs) == 5
        assert "# extra:" in a

    def test_bench_csv(self, capsys, tmp_path):
        out = tmp_path / "b.csv"
        code, _, err = run(capsys, "bench", "--vars", "4", "--trials", "3", "--csv", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "algo,n,trial,wall_nanos,min_ops,outcome,checksum"
        assert len(lines) == 1 + 4 * 3
        assert "median incr" in err

    def test_bench_bad_algo(self, capsys):
        assert run(capsys, "bench", "--algos", "quick")[0] == 1

    def test_bench_verification_failure(self, capsys, monkeypatch):
        from octclose import incremental

        def broken(m, o, counter=None):
            return incremental.incr(m, o.__class__(o.a, o.b, o.d + 1), counter=counter)

        monkeypatch.setitem(incremental.ALGORITHMS, "incr", broken)
        assert run(capsys, "bench", "--vars", "3", "--trials", "5", "--algos", "incr")[0] == 3

    def test_help(self, capsys):
        assert run(capsys, "--help")[0] == 0
        assert run(capsys)[0] == 1
