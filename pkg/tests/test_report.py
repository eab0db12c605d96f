from hgctl.cli import main
from hgctl.report import CELLS, cell_name, route_table, sweep


def test_route_table_covers_every_cell():
    rows = route_table()
    assert len(CELLS) == 24 and len(rows) == 2 * 3 * 24
    assert ("friends", "dag", "IR-NA-add", "never") in rows
    assert ("additive", "dag", "CS-GR-add", "xp") in rows
    assert ("friends", "general", "IR-NA-del", "immune") in rows
    assert cell_name(CELLS[0]) == "IR-NA-add"


def test_threaded_sweep_matches_serial():
    assert sweep("friends", 6, seed=2, threads=2) == sweep("friends", 6, seed=2)


def test_report_writes_tables_and_figures(tmp_path, capsys):
    out = tmp_path / "rep"
    assert main(["report", "--out", str(out), "--instances", "4", "--seed", "1"]) == 0
    printed = capsys.readouterr().out.split()
    assert [p.rsplit("/", 1)[-1] for p in printed] == ["routes.tsv", "agreement.tsv",
                                                       "routes.png", "agreement.png"]
    rows = (out / "agreement.tsv").read_text().splitlines()
    assert rows[0] == "model\tcell\tcompared\tagree\tminimal"
    for line in rows[1:]:
        _, _, n, agree, minimal = line.split("\t")
        assert n == agree == minimal
    assert len((out / "routes.tsv").read_text().splitlines()) == 145
    for png in ("routes.png", "agreement.png"):
        assert (out / png).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
