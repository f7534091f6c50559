import numpy as np
import pytest

from feastlib.cli import main, run_driver

HELLO_IN = """s      ! problem kind
d      ! precision
F      ! storage
-5.0e0 ! Emin
5.0e0  ! Emax
2      ! M0
!!!!FEASTPARAM overrides
1      ! print runtime report
8      ! contour points
12     ! tolerance exponent
20     ! loop budget
0      ! criterion kind
"""

HELLO_A = """2 2 4
1 1 2.0
1 2 -1.0
2 1 -1.0
2 2 2.0
"""


@pytest.fixture
def hello_prefix(tmp_path):
    (tmp_path / "hello.in").write_text(HELLO_IN)
    (tmp_path / "hello.A").write_text(HELLO_A)
    return str(tmp_path / "hello")


def _strip_time(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("Time (s)"))


def test_helloworld_run(hello_prefix, capsys):
    assert run_driver(hello_prefix) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 2 2" in out
    assert "1 1.000000000000000e+00" in out
    assert "2 3.000000000000000e+00" in out
    assert "==>FEAST has successfully converged" in out
    # loop-0 line reports a unit trace error
    loop0 = [l for l in out.splitlines() if l.startswith("0 ")]
    assert loop0 and "1.000000000000000e+00" in loop0[0]


def test_interval_error_exit_code(tmp_path, capsys):
    (tmp_path / "bad.in").write_text(HELLO_IN.replace("-5.0e0", "7.0e0"))
    (tmp_path / "bad.A").write_text(HELLO_A)
    assert run_driver(str(tmp_path / "bad")) == 1
    err = capsys.readouterr().err
    assert "Emin>=Emax" in err


def test_missing_files_exit_two(tmp_path, capsys):
    assert run_driver(str(tmp_path / "nothing")) == 2
    assert "nothing.in" in capsys.readouterr().err
    (tmp_path / "only.in").write_text(HELLO_IN)
    assert run_driver(str(tmp_path / "only")) == 2
    assert "only.A" in capsys.readouterr().err


def test_missing_b_for_generalized(tmp_path, capsys):
    (tmp_path / "gen.in").write_text(HELLO_IN.replace("s      ! problem kind",
                                                      "g      ! problem kind"))
    (tmp_path / "gen.A").write_text(HELLO_A)
    assert run_driver(str(tmp_path / "gen")) == 2
    assert "gen.B" in capsys.readouterr().err


def test_parse_error_exit_two(tmp_path, capsys):
    (tmp_path / "bad.in").write_text(HELLO_IN)
    (tmp_path / "bad.A").write_text("2 2 1\n1 zz 1.0\n")
    assert run_driver(str(tmp_path / "bad")) == 2
    assert "line 2" in capsys.readouterr().err


def test_seed_determinism(hello_prefix, capsys):
    assert main([hello_prefix, "--seed", "42", "--parallel-contour", "8"]) == 0
    first = _strip_time(capsys.readouterr().out)
    assert main([hello_prefix, "--seed", "42", "--parallel-contour", "8"]) == 0
    second = _strip_time(capsys.readouterr().out)
    assert first == second


@pytest.mark.parametrize("fmt", ["dense", "banded", "sparse"])
def test_format_selection(hello_prefix, capsys, fmt):
    assert main([hello_prefix, "--format", fmt]) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 2 2" in out
    assert "1 1.000000000000000e+00" in out


def test_generalized_problem(tmp_path, capsys):
    (tmp_path / "gen.in").write_text(
        "g\nd\nF\n0.0\n5.0\n2\n!!!!FEASTPARAM\n0\n8\n12\n20\n0\n")
    (tmp_path / "gen.A").write_text("2 2 2\n1 1 2.0\n2 2 6.0\n")
    (tmp_path / "gen.B").write_text("2 2 2\n1 1 2.0\n2 2 2.0\n")
    assert run_driver(str(tmp_path / "gen")) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 2 2" in out
    assert "1 1.000000000000000e+00" in out
    assert "2 3.000000000000000e+00" in out


def test_complex_hermitian_problem(tmp_path, capsys):
    (tmp_path / "herm.in").write_text(
        "s\nz\nF\n0.0\n4.0\n3\n!!!!FEASTPARAM\n0\n8\n12\n20\n0\n")
    # tridiagonal with +i off-diagonal: spectrum {2-sqrt2, 2, 2+sqrt2}
    (tmp_path / "herm.A").write_text(
        "3 3 7\n"
        "1 1 2.0 0.0\n1 2 0.0 1.0\n"
        "2 1 0.0 -1.0\n2 2 2.0 0.0\n2 3 0.0 1.0\n"
        "3 2 0.0 -1.0\n3 3 2.0 0.0\n")
    assert run_driver(str(tmp_path / "herm")) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 3 3" in out
    assert "2 2.000000000000000e+00" in out


def test_lower_triangle_input(tmp_path, capsys):
    (tmp_path / "lo.in").write_text(
        "s\nd\nL\n-5.0\n5.0\n2\n!!!!FEASTPARAM\n0\n8\n12\n20\n0\n")
    (tmp_path / "lo.A").write_text("2 2 3\n1 1 2.0\n2 1 -1.0\n2 2 2.0\n")
    assert run_driver(str(tmp_path / "lo")) == 0
    out = capsys.readouterr().out
    assert "1 1.000000000000000e+00" in out


def test_iterative_solver_flag(hello_prefix, capsys):
    assert main([hello_prefix, "--solver", "iterative", "--iter-tol", "1e-8"]) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 2 2" in out


def test_single_precision_problem(tmp_path, capsys):
    (tmp_path / "sp.in").write_text(
        "s\ns\nF\n-5.0\n5.0\n2\n!!!!FEASTPARAM\n0\n8\n5\n20\n0\n")
    (tmp_path / "sp.A").write_text(HELLO_A)
    assert run_driver(str(tmp_path / "sp")) == 0
    out = capsys.readouterr().out
    assert "mode found/subspace 2 2" in out
    values = [float(l.split()[1]) for l in out.splitlines()
              if l and l.split()[0] in ("1", "2") and "e" in l.split()[1]]
    assert np.allclose(sorted(values), [1.0, 3.0], atol=1e-4)


def test_warning_still_exits_zero(tmp_path, capsys):
    # interval holding no spectrum: warning 1, exit code 0
    (tmp_path / "w.in").write_text("s\nd\nF\n10.0\n20.0\n2\n")
    (tmp_path / "w.A").write_text(HELLO_A)
    assert run_driver(str(tmp_path / "w")) == 0
    captured = capsys.readouterr()
    assert "warning 1" in captured.err
    assert "mode found/subspace 0 2" in captured.out
