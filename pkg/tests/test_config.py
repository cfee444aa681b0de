import pytest

from peakons.config import ConfigError, apply_overrides, load_config, parse_config

GOOD = """\
[equation]
f = k*(u-2)*(u-1)   # inline comment
g = lam*(3-2*u)
k = 1
lam = 1

[run]
t0 = -6
horizon = 6
A = 1.0025
oscillatory = no

[tolerances]
ode_tol = 1e-11
"""


def test_parse_full_config():
    cfg = parse_config(GOOD).validate()
    assert cfg.equation.f == "k*(u-2)*(u-1)"
    assert cfg.equation.params == {"k": 1.0, "lam": 1.0}
    assert cfg.run.t0 == -6.0 and cfg.run.horizon == 6.0
    assert cfg.run.oscillatory is False
    assert cfg.tolerances.ode_tol == 1e-11
    assert cfg.equation.spec().g_text == "lam*(3-2*u)"


def test_missing_g_names_field_and_line():
    with pytest.raises(ConfigError) as info:
        parse_config("# header\n[equation]\nf = ux\n").validate()
    assert "'g'" in str(info.value)
    assert info.value.line == 2


def test_bad_expression_reports_line_and_offset():
    with pytest.raises(ConfigError) as info:
        parse_config("[equation]\nf = 2u\ng = u\n").validate()
    assert info.value.line == 2
    assert "offset 1" in str(info.value)


@pytest.mark.parametrize("text,line", [
    ("[equation]\nf = ux\ng = u\n[run]\nhorizon = soon\n", 5),
    ("[equation]\nf = ux\ng = u\n[run]\nspeed = 1\n", 5),
    ("[equation]\nf = ux\ng = u\nk = one\n", 4),
    ("[equation]\nf = ux\ng = u\n[extras]\n", 4),
    ("[equation]\nf = ux\ng = u\n[tolerances]\nquad_tol = -1\n", 5),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text).validate()
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_overrides_win(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(GOOD)
    cfg = load_config(str(path), {"run.horizon": 2.0, "equation.params": {"k": 3.0}, "run.A": None})
    assert cfg.run.horizon == 2.0
    assert cfg.equation.params["k"] == 3.0
    assert cfg.run.A == 1.0025
    cfg = apply_overrides(cfg, {"equation.f": "ux"})
    assert cfg.equation.f == "ux"


def test_unreadable_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")


def test_vectors_must_match():
    with pytest.raises(ConfigError):
        parse_config("[equation]\nf = ux\ng = u\n[run]\na = 1, 2\nx = 0\n").validate()
