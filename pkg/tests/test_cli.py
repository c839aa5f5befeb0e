"""Config parsing and end-to-end CSV artifacts through the CLI."""

import pytest

from ruellezeta.cli import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    ConfigError,
    main,
    parse_config,
)

LAM_FIRST_TORUS = -0.88474246748757945

TORUS_LINES = [
    "surface.type = funneled_torus",
    "surface.l1 = 10.0",
    "surface.l2 = 10.0",
    "surface.phi = 1.5707963267948966",
]


def _cfg(*extra):
    return "\n".join(TORUS_LINES + list(extra)) + "\n"


def test_defaults_are_recorded():
    cfg = parse_config(_cfg())
    assert cfg.symmetry == "full"
    assert cfg.nmax == 7
    assert set(cfg.defaults_applied) == {
        "symmetry=full", "nmax=7", "grid.resolution=50", "grid.mode=full",
        "metric=cayley_angular"}


def test_asymmetric_lengths_default_to_trivial():
    text = _cfg().replace("surface.l2 = 10.0", "surface.l2 = 11.0")
    cfg = parse_config(text)
    assert cfg.symmetry == "trivial"
    assert "symmetry=trivial" in cfg.defaults_applied


def test_comments_and_blanks_skipped():
    cfg = parse_config("# a comment\n\n" + _cfg("  # indented comment"))
    assert cfg.surface_type == "funneled_torus"


def test_unknown_key_cites_line():
    with pytest.raises(ConfigError, match=r"line 5: unknown key 'sgima'"):
        parse_config(_cfg("sgima = 0.1"))


def test_duplicate_key_cites_both_lines():
    with pytest.raises(ConfigError,
                       match=r"line 5: duplicate key 'surface.l1' "
                             r"\(first at line 2\)"):
        parse_config(_cfg("surface.l1 = 9.0"))


def test_bad_values_cite_line():
    with pytest.raises(ConfigError, match="line 5: sigma must be positive"):
        parse_config(_cfg("sigma = -1"))
    with pytest.raises(ConfigError, match="line 5: invalid value for nmax"):
        parse_config(_cfg("nmax = two"))
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config(_cfg("just some words"))


def test_missing_required_keys():
    with pytest.raises(ConfigError, match="missing required key"):
        parse_config("surface.l1 = 10.0\nsurface.l2 = 10.0\n")
    with pytest.raises(ConfigError, match="requires surface.phi"):
        parse_config("\n".join(TORUS_LINES[:3]))


def test_lambda0_needs_both_parts():
    with pytest.raises(ConfigError, match="missing lambda0.im"):
        parse_config(_cfg("lambda0.re = -0.88"))


def test_surface_parameter_mismatches():
    with pytest.raises(ConfigError, match="l3 does not apply"):
        parse_config(_cfg("surface.l3 = 12.0"))
    with pytest.raises(ConfigError, match="phi does not apply"):
        parse_config("surface.type = three_funnel\nsurface.l1 = 12\n"
                     "surface.l2 = 12\nsurface.l3 = 12\nsurface.phi = 1.0\n")


def test_full_symmetry_needs_equal_lengths():
    text = _cfg("symmetry = full").replace("surface.l2 = 10.0",
                                           "surface.l2 = 11.0")
    with pytest.raises(ConfigError, match="equal length parameters"):
        parse_config(text)


def test_grid_mode_prerequisites():
    with pytest.raises(ConfigError, match="requires grid.letters"):
        parse_config(_cfg("grid.mode = level1"))
    with pytest.raises(ConfigError, match="requires grid.bounds_minus"):
        parse_config(_cfg("grid.mode = explicit"))
    cfg = parse_config(_cfg("grid.mode = explicit",
                            "grid.bounds_minus = 0.40:0.41;0.42:0.43",
                            "grid.bounds_plus = -0.43:-0.40"))
    assert cfg.bounds_minus == ((0.40, 0.41), (0.42, 0.43))
    assert cfg.bounds_plus == ((-0.43, -0.40),)


def test_partial_windows_rejected():
    with pytest.raises(ConfigError, match="scan window needs all"):
        parse_config(_cfg("scan.re_min = -1.0"))
    with pytest.raises(ConfigError, match="degenerate scan window"):
        parse_config(_cfg("scan.re_min = -0.8", "scan.re_max = -0.9",
                          "scan.im_min = 0.0", "scan.im_max = 1.0"))
    with pytest.raises(ConfigError, match="base region needs all"):
        parse_config(_cfg("grid.xmin = 0.0"))


# ---------------------------------------------------------------------------
# end-to-end runs


def _write(tmp_path, name, *extra):
    path = tmp_path / name
    path.write_text(_cfg(*extra), encoding="utf-8")
    return str(path)


def test_surface_validate_runs(tmp_path, capsys):
    conf = _write(tmp_path, "s.cfg")
    assert main(["surface-validate", "--config", conf]) == EXIT_OK
    out = capsys.readouterr().out
    assert "valid Schottky data" in out
    assert "4 elements, 4 characters" in out


def test_words_stats_table(tmp_path, capsys):
    conf = _write(tmp_path, "w.cfg", "nmax = 3")
    assert main(["words-stats", "--config", conf]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split() == ["n", "closed", "classes", "primitive",
                                "orbit_reps"]
    table = [[int(tok) for tok in line.split()] for line in lines[1:]]
    assert [row[1] for row in table] == [4, 12, 28]
    assert [row[4] for row in table] == [3, 3, 8]
    assert all(row[3] >= 1 for row in table)


def test_resonances_artifact(tmp_path, capsys):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    extra = ["nmax = 6", "scan.re_min = -0.95", "scan.re_max = -0.80",
             "scan.im_min = -0.10", "scan.im_max = 0.10"]
    conf_a = _write(tmp_path, "ra.cfg", *extra, "output = %s" % out_a)
    conf_b = _write(tmp_path, "rb.cfg", *extra, "output = %s" % out_b)
    assert main(["resonances", "--config", conf_a]) == EXIT_OK
    assert main(["resonances", "--config", conf_b]) == EXIT_OK
    capsys.readouterr()

    text = out_a.read_text(encoding="utf-8")
    lines = text.strip().splitlines()
    assert lines[0] == "# command=resonances"
    header_idx = lines.index("re,im,character,order,newton_residual")
    rows = lines[header_idx + 1:]
    assert len(rows) == 1
    re_s, im_s, char, order, residual = rows[0].split(",")
    assert abs(float(re_s) - LAM_FIRST_TORUS) <= 1e-8
    assert abs(float(im_s)) <= 1e-10
    assert char == "A" and int(order) == 1
    assert float(residual) <= 1e-12

    # reruns are byte identical apart from the output path they cite
    body_a = text.replace(str(out_a), "OUT")
    body_b = out_b.read_text(encoding="utf-8").replace(str(out_b), "OUT")
    assert body_a == body_b

    # every effective config key shows up in the header
    cfg = parse_config(
        (tmp_path / "ra.cfg").read_text(encoding="utf-8"))
    present = {line.split("=", 1)[0] for line in lines
               if line.startswith("# config.")}
    assert present == {"# config.%s" % key
                       for key, _ in cfg.effective_items()}


def test_resonances_rejects_gaussian_weight(tmp_path, capsys):
    conf = _write(tmp_path, "r.cfg", "weight.kind = gauss_base",
                  "scan.re_min = -0.95", "scan.re_max = -0.80",
                  "scan.im_min = -0.10", "scan.im_max = 0.10",
                  "output = %s" % (tmp_path / "r.csv"))
    assert main(["resonances", "--config", conf]) == EXIT_VALIDATION
    assert "constant weight" in capsys.readouterr().err


def test_section_artifact_and_rerun(tmp_path, capsys):
    out_a = tmp_path / "sa.csv"
    out_b = tmp_path / "sb.csv"
    extra = ["nmax = 6", "sigma = 0.05", "grid.resolution = 2",
             "lambda0.re = %.17g" % LAM_FIRST_TORUS, "lambda0.im = 0.0"]
    conf_a = _write(tmp_path, "sa.cfg", *extra, "output = %s" % out_a)
    conf_b = _write(tmp_path, "sb.cfg", *extra, "output = %s" % out_b)
    assert main(["distribution-section", "--config", conf_a]) == EXIT_OK
    assert main(["distribution-section", "--config", conf_b]) == EXIT_OK
    capsys.readouterr()
    lines = out_a.read_text(encoding="utf-8").strip().splitlines()
    header_idx = lines.index("x_minus,x_plus,re,im,ok")
    rows = [line.split(",") for line in lines[header_idx + 1:]]
    assert len(rows) == 12 * 2 * 2
    assert all(tok[4] == "1" for tok in rows)
    assert all(float(tok[2]) != 0.0 for tok in rows)
    body_a = out_a.read_text(encoding="utf-8").replace(str(out_a), "OUT")
    body_b = out_b.read_text(encoding="utf-8").replace(str(out_b), "OUT")
    assert body_a == body_b


def test_base_artifact(tmp_path, capsys):
    out = tmp_path / "base.csv"
    conf = _write(tmp_path, "base.cfg", "nmax = 6", "sigma = 0.2",
                  "grid.resolution = 4", "weight.kind = gauss_base",
                  "lambda0.re = %.17g" % LAM_FIRST_TORUS, "lambda0.im = 0.0",
                  "grid.xmin = -1.0", "grid.xmax = 1.0",
                  "grid.ymin = 0.1", "grid.ymax = 1.5",
                  "output = %s" % out)
    assert main(["distribution-base", "--config", conf]) == EXIT_OK
    capsys.readouterr()
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    header_idx = lines.index("x,y,re,im,mask")
    assert len(lines[header_idx + 1:]) == 16


def test_unlocated_lambda_exit_and_hint(tmp_path, capsys):
    conf = _write(tmp_path, "u.cfg", "nmax = 6", "sigma = 0.05",
                  "grid.resolution = 2", "lambda0.re = -0.5",
                  "lambda0.im = 0.1", "output = %s" % (tmp_path / "u.csv"))
    assert main(["distribution-section", "--config", conf]) == EXIT_NUMERICAL
    err = capsys.readouterr().err
    assert "numerical failure" in err
    assert ("lambda0 must be a located determinant zero; run the "
            "resonances command first") in err


def test_config_errors_exit_validation(tmp_path, capsys):
    conf = _write(tmp_path, "bad.cfg", "sigma = -1")
    assert main(["words-stats", "--config", conf]) == EXIT_VALIDATION
    assert "sigma must be positive" in capsys.readouterr().err

    missing = _write(tmp_path, "m.cfg", "nmax = 6", "sigma = 0.05",
                     "output = %s" % (tmp_path / "m.csv"))
    assert main(["distribution-section", "--config", missing]) \
        == EXIT_VALIDATION
    assert "lambda0.re" in capsys.readouterr().err


def test_unreadable_config_exits_validation(tmp_path, capsys):
    assert main(["words-stats", "--config",
                 str(tmp_path / "absent.cfg")]) == EXIT_VALIDATION
    assert "cannot read config" in capsys.readouterr().err


def test_unknown_command_exits_validation(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", "--config", "x"])
    assert info.value.code == EXIT_VALIDATION
    capsys.readouterr()
