from hsecagg.cli import main


def write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


def test_rates_command(capsys):
    assert main(["rates", "--U", "3", "--V", "3", "--U0", "2", "--V0", "2", "--T", "2"]) == 0
    out = capsys.readouterr().out
    assert "rx2_min=1/2" in out and "ry2_upper=1" in out and "tight=true" in out
    assert main(["rates", "--U", "3", "--V", "3", "--U0", "1", "--V0", "2", "--T", "2"]) == 2


def test_matrix_keys_and_session(tmp_path, capsys):
    cfg = write(tmp_path, "U=3\nV=3\nU0=2\nV0=2\nT=2\nseed=1\n")
    alpha = tmp_path / "alpha.txt"
    assert main(["find-mds", "--config", cfg, "--out", str(alpha)]) == 0
    assert alpha.read_text().startswith("U=3 V=3 U0=2 V0=2 T=2 q=")
    assert main(["deal", "--config", cfg, "--mds", str(alpha)]) == 0
    assert capsys.readouterr().out.count("user=") == 9
    assert main(["simulate", "--config", cfg, "--mds", str(alpha),
                 "--pattern", "U1=3 U2=3 V1=3,3,3 V2=3,3,0"]) == 0
    assert capsys.readouterr().out.rstrip().endswith("pass=true")
    assert main(["simulate", "--config", cfg, "--pattern", "U1=1 U2=1 V1=3,3,3 V2=3,0,0"]) == 2


def test_verify_security_exit_codes(tmp_path, capsys):
    cfg = write(tmp_path, "U=2\nV=2\nU0=2\nV0=1\nT=0\n")
    assert main(["verify-security", "--config", cfg]) == 0
    assert main(["verify-security", "--config", cfg, "--no-mask", "--failures-only"]) == 1
    assert "pass=false" in capsys.readouterr().out


def test_campaign_and_config_errors(tmp_path, capsys):
    cfg = write(tmp_path, "U=2\nV=2\nU0=2\nV0=1\nT=0\ninputs=3\n")
    assert main(["campaign", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "security.txt").exists()
    bad = write(tmp_path, "U=2\nV=2\nU0=2\nV0=1\nT=0\nturbo=1\n")
    assert main(["campaign", "--config", bad]) == 2
    assert "unknown keys: turbo" in capsys.readouterr().err
