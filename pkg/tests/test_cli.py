import json

import pytest

from cuspfields.cli_io import BasisCache, FormFile
from cuspfields.cli_io import cli
from cuspfields.cli_io.formfile import FormFileError, bundled_forms, bundled_path
from cuspfields.expansion_engine import clear_basis_cache, use_basis_store
from cuspfields.field_bounds import FieldBoundReport


@pytest.fixture(autouse=True)
def _detach_store():
    yield
    use_basis_store(None)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("label", bundled_forms())
def test_form_files_round_trip_exactly(label):
    text = bundled_path(label).read_text()
    assert FormFile.parse(text).to_text() == text
    f = FormFile.parse(text)
    assert FormFile.from_input(f.to_input(), f.comments).to_text() == text


@pytest.mark.parametrize(
    "mutation,match",
    [
        (lambda t: t.replace("level: 11", "levle: 11"), "unknown header key"),
        (lambda t: t.replace("\n5 1\n", "\n"), "coefficients must be listed"),
        (lambda t: t.replace("\n5 1\n", "\n5 one\n"), "malformed value"),
        (lambda t: t.replace("newform: yes", "newform: maybe"), "newform"),
        (lambda t: t.replace("precision: 84", "precision: 90"), "coefficients must be listed"),
        (lambda t: t.replace("\n3 -1\n", "\n3 -1\n3 -1\n"), "repeated"),
    ],
)
def test_form_file_errors(mutation, match):
    text = bundled_path("11a").read_text()
    bad = mutation(text)
    assert bad != text
    with pytest.raises(FormFileError, match=match):
        FormFile.parse(bad)


def test_expand_level9(capsys, tmp_path):
    out_file = tmp_path / "f.txt"
    code, out, _ = run(capsys, "--no-cache", "expand", "9a", "-g", "0,-1,1,3", "-o", str(out_file))
    assert code == 0
    assert "(3*z9^2) * Q(zeta_3)" in out
    assert "membership in the predicted module: yes" in out
    assert out_file.read_text().startswith("w=9")


def test_usage_errors(capsys):
    assert run(capsys, "expand", "9a", "-g", "1,1,1,1")[0] == cli.EXIT_USAGE  # det 0
    assert run(capsys, "expand", "9a", "-g", "1,2")[0] == cli.EXIT_USAGE
    assert run(capsys, "expand", "no-such-form", "-g", "1,0,0,1")[0] == cli.EXIT_USAGE
    assert run(capsys, "verify", "no-such-suite")[0] == cli.EXIT_USAGE
    assert run(capsys, "bound", "-N", "9")[0] == cli.EXIT_USAGE
    assert run(capsys, "optimize", "-N", "36", "--cusp", "2/6")[0] == cli.EXIT_USAGE
    assert run(capsys, "optimize", "-N", "9", "--cusp", "1/3", "--replay", "9a")[0] == cli.EXIT_USAGE
    assert run(capsys, "--config", "/nonexistent.ini", "verify", "all")[0] == cli.EXIT_USAGE


def test_internal_error_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "field_bound", lambda *a: (_ for _ in ()).throw(RuntimeError("invariant")))
    code, _, err = run(capsys, "bound", "-N", "9", "-k", "2", "-g", "1,0,0,1")
    assert code == cli.EXIT_INTERNAL
    assert "internal invariant" in err


def test_bound_machine_output_parses(capsys):
    code, out, _ = run(capsys, "bound", "--form", "9a", "-g", "0,-1,1,3", "--machine")
    assert code == 0
    rep = FieldBoundReport.from_text(out)
    assert (rep.nprime, rep.mprime) == (3, 9)


def test_bound_metadata_only_and_sweep(capsys):
    code, out, _ = run(capsys, "bound", "-N", "9", "-k", "3", "--character", "9: 2->1/6", "-g", "0,-1,1,3")
    assert code == 0 and "N' = 3" in out
    code, out, _ = run(capsys, "bound", "-N", "36", "-k", "2", "--sweep")
    assert code == 0
    assert out.count("cusp ") == 12


def test_optimize_replay(capsys):
    code, out, _ = run(capsys, "--no-cache", "optimize", "-N", "36", "--cusp", "1/6", "--replay", "36a")
    assert code == 0
    assert "Q = 36" in out
    assert "identical" in out


def test_verify_small_suite(capsys):
    code, out, _ = run(capsys, "verify", "field-bounds-brute", "--max-level", "12", "--count", "3")
    assert code == 0
    assert "PASS" in out


def test_cache_build_corrupt_and_purge(capsys, tmp_path):
    d = tmp_path / "cache"
    clear_basis_cache()
    code, out, _ = run(capsys, "--cache-dir", str(d), "cache", "build", "-N", "5", "-k", "2")
    assert code == 0
    assert "identical expansions: yes" in out
    code, out, _ = run(capsys, "--cache-dir", str(d), "cache", "build", "-N", "5", "-k", "2")
    assert "loaded from cache" in out
    entry = next(d.glob("*.json"))
    doc = json.loads(entry.read_text())
    doc["payload"] = doc["payload"].replace('"N": 5', '"N": 6')
    entry.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "--cache-dir", str(d), "cache", "inspect")
    assert code == cli.EXIT_FAIL and "valid=False" in out
    # a corrupt entry is discarded and rebuilt rather than trusted
    cache = BasisCache(d)
    assert cache.load("Gamma1", 5, 2, int(entry.name.split("-p")[1].split("-")[0])) is None
    assert not entry.exists()
    code, out, _ = run(capsys, "--cache-dir", str(d), "cache", "purge")
    assert code == 0


def test_config_file_supplies_defaults(capsys, tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[cuspfields]\nprec = 7\n")
    code, out, _ = run(capsys, "--config", str(ini), "--no-cache", "expand", "11a", "-g", "1,0,1,1")
    assert code == 0
    assert "7 coefficients" in out


def test_config_file_bad_value(capsys, tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[cuspfields]\nprec = many\n")
    assert run(capsys, "--config", str(ini), "expand", "11a", "-g", "1,0,1,1")[0] == cli.EXIT_USAGE
