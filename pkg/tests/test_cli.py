import io
import subprocess
import sys
from importlib import resources


from dode.cli import main

CORPUS_DIR = resources.files("dode.corpus")


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def corpus(name):
    return str(CORPUS_DIR.joinpath(f"{name}.rm"))


def test_eval():
    assert call("eval", "--fn", "isqrt", "--args", "10") == (0, "3\n")
    assert call("eval", "--fn", "pow2_lenprod", "--args", "5,3") == (0, "64\n")
    assert call("eval", "--fn", "ifz", "--args", "0,-4,9") == (0, "-4\n")


def test_simulate():
    assert call("simulate", "--program", corpus("add"), "--inputs", "3,4") == (0, "7\nsteps=3\n")
    code, text = call("simulate", "--program", corpus("triangular"), "--inputs", "9", "--max-steps", "4")
    assert code == 0 and text.endswith("halted=false\n")


def test_simulate_ram(tmp_path):
    prog = tmp_path / "p.ram"
    prog.write_text("LA 5\nMAB\nAOP *\nHALT\n")
    assert call("simulate", "--program", str(prog), "--ram") == (0, "25\nsteps=4\n")
    assert call("simulate", "--program", str(prog), "--ram", "--opset", "basic")[0] == 1


def test_compile_then_solve(tmp_path):
    out = tmp_path / "add.ode"
    code, _ = call("compile", "--program", corpus("add"), "--out", str(out))
    assert code == 0
    assert call("solve", "--system", str(out), "--T", "8", "--inputs", "3,4") == (0, "7\n")
    assert call("solve", "--system", str(out), "--x", "255", "--inputs", "3,4") == (0, "7\n")


def test_compile_roundtrip_matches_in_memory(tmp_path):
    from dode.compiler import compile_rm, load_corpus, output, run_compiled
    out = tmp_path / "max.ode"
    call("compile", "--program", corpus("max"), "--out", str(out), "--arity", "2")
    cs = compile_rm(load_corpus("max"), 2)
    for a in range(5):
        for b in range(5):
            code, text = call("solve", "--system", str(out), "--T", "40", "--inputs", f"{a},{b}")
            assert text == f"{output(run_compiled(cs, (a, b), 40))}\n"


def test_solve_plain_system(tmp_path):
    f = tmp_path / "s.ode"
    f.write_text("system pow\nstate f\nwrt x\ninit f = 1\nderiv f = f\n")
    assert call("solve", "--system", str(f), "--x", "10") == (0, "1024\n")
    assert call("solve", "--system", str(f), "--x", "100", "--guard", "8")[0] == 1


def test_solve_bad_file(tmp_path):
    f = tmp_path / "bad.ode"
    f.write_text("state f\n")
    assert call("solve", "--system", str(f), "--x", "1")[0] == 1
    assert call("solve", "--system", str(tmp_path / "missing.ode"), "--x", "1")[0] == 1


def test_usage_errors(capsys):
    assert call("eval", "--fn", "isqrt", "--args", "ten")[0] == 2
    assert "--args" in capsys.readouterr().err
    assert call("frobnicate")[0] == 2
    assert call("solve", "--system", "x.ode", "--x", "1", "--T", "2")[0] == 2
    assert call("bench", "--fn", "isqrt", "--bits", "0")[0] == 2


def test_domain_error_exit_code():
    assert call("eval", "--fn", "idiv", "--args", "5,0")[0] == 1


def test_verify_and_bench():
    code, text = call("verify", "--suite", "all", "--limit", "20")
    assert code == 0
    assert "parameterized_integral" in text and "triangular" in text
    code, text = call("bench", "--fn", "pow2_len", "--bits", "300")
    assert code == 0 and "steps=300" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dode", "eval", "--fn", "len", "--args", "12"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "4\n"
