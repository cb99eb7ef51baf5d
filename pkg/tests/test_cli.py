import json

from asktable.cli import main, render_answer, render_bars, render_table
from asktable.values import TableColumn, Value, scalar, series
from asktable.viz import VizSpec


class TestOneShot:
    def test_success_exit_code_and_output(self, capsys):
        code = main(["--reference-year", "2020",
                     "What was the price of honey in Alabama in 2010?"])
        out = capsys.readouterr().out
        assert code == 0
        assert "2.4" in out
        assert "top-3 viz:" in out

    def test_unintelligible_exit_code(self, capsys):
        code = main(["--reference-year", "2020", "asdf qwer"])
        assert code == 2

    def test_table_renders_as_text(self, capsys):
        code = main(["--reference-year", "2020",
                     "Show me all data for Alabama in 2010 as a table"])
        out = capsys.readouterr().out
        assert code == 0
        assert "state" in out and "Alabama" in out

    def test_missing_dataset_exit_code(self, capsys):
        code = main(["--dataset", "/nonexistent.csv", "anything"])
        assert code == 1


class TestEvalMode:
    def test_eval_writes_report(self, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        code = main(["--eval", "--reference-year", "2020",
                     "--report", str(report_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "simple" in out and "baseline" in out
        doc = json.loads(report_path.read_text())
        assert doc["per_class"]["simple"]["variants"] == 80

    def test_eval_respects_top_n(self, capsys):
        code = main(["--eval", "--reference-year", "2020", "--top-n", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "top1" in out


class TestRendering:
    def test_render_table_alignment(self):
        value = Value(
            kind="table",
            schema=[TableColumn("name", "categorical"), TableColumn("x", "numerical")],
            rows=[("alpha", 1.0), ("beta", 22.5)],
        )
        text = render_table(value)
        lines = text.splitlines()
        assert lines[0].startswith("name")
        assert len(lines) == 4

    def test_render_bars_scales(self):
        value = series([("a", 1.0), ("b", 10.0)], "categorical", unit="lb")
        text = render_bars(value)
        a_line, b_line = text.splitlines()[:2]
        assert b_line.count("#") > a_line.count("#")
        assert "(lb)" in text

    def test_render_answer_scalar(self):
        spec = VizSpec(viz_type="kpi_card", binding={}, title="t", ranking=[("kpi_card", 3)])
        out = render_answer(scalar(2.4, "USD/lb"), spec)
        assert "2.4 USD/lb" in out
        assert "kpi_card (3)" in out

    def test_repl_graph_command_outputs_valid_document(self, capsys, monkeypatch):
        inputs = iter(["What was the price of honey in Alabama in 2010?", ":graph", ":quit"])
        monkeypatch.setattr("builtins.input", lambda prompt="": next(inputs))
        code = main(["--reference-year", "2020"])
        out = capsys.readouterr().out
        assert code == 0
        graph_line = [l for l in out.splitlines() if l.startswith("{")][0]
        doc = json.loads(graph_line)
        assert set(doc) == {"nodes", "edges", "sink", "depth", "relevance", "complete"}

    def test_repl_back_command(self, capsys, monkeypatch):
        inputs = iter([
            "What was the price of honey in Alabama in 2010?",
            ":back 1",
            ":top3",
            ":quit",
        ])
        monkeypatch.setattr("builtins.input", lambda prompt="": next(inputs))
        code = main(["--reference-year", "2020"])
        out = capsys.readouterr().out
        assert code == 0
        assert "[n3_project]" in out
