from pathlib import Path

from axonpipe import persist
from axonpipe.cli import main
from axonpipe.render import RenderSettings, render
from axonpipe.svg import emit_svg
from axonpipe.symbols import save_library

GOLDEN = Path(__file__).parent / "golden" / "f1.svg"


def test_golden_f1_svg(f1, library):
    s, _ = f1
    data = emit_svg(render(s, RenderSettings(axes_glyph=True), library=library))
    assert data == GOLDEN.read_bytes()


def test_cli_new_and_open(tmp_path, capsys):
    target = tmp_path / "empty.json"
    assert main(["new", str(target)]) == 0
    assert main(["open", str(target)]) == 0
    out = capsys.readouterr().out
    assert "empty" in out


def test_cli_run_and_render(tmp_path, library, capsys):
    lib_path = tmp_path / "lib.json"
    save_library(library, str(lib_path))
    script = tmp_path / "build.axon"
    script.write_text(
        "add_pipe 0,0,0 1000,0,0\n"
        "add_pipe 1000,0,0 1000,0,1000\n"
        "connect_ends 1 b 2 a\n"
        "place_block gate_valve_100 500,0,0\n"
        "place_height_mark 1 0.25 0.0\n",
        encoding="utf-8")
    saved = tmp_path / "scheme.json"
    assert main(["run", str(script), "--save", str(saved),
                 "--library", str(lib_path)]) == 0
    scheme = persist.load(str(saved))
    assert len(scheme.pipes) == 2 and len(scheme.blocks) == 1

    out_svg = tmp_path / "out.svg"
    assert main(["render", str(saved), "-o", str(out_svg), "--glyph",
                 "--projection", "isometric", "--library", str(lib_path)]) == 0
    assert out_svg.read_bytes() == GOLDEN.read_bytes()


def test_cli_run_reports_error_line(tmp_path, capsys):
    script = tmp_path / "bad.axon"
    script.write_text("add_pipe 0,0,0 1000,0,0\nnot_a_verb\n", encoding="utf-8")
    assert main(["run", str(script)]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err


def test_cli_kernel_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "none.json"
    assert main(["open", str(missing)]) == 1
    assert "IoError" in capsys.readouterr().err
