import json

from asktable.engine import Engine, EngineConfig


class TestConfigSources:
    def test_config_file_and_env_overrides(self, tmp_path, monkeypatch):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"reference_year": 2015, "beam_width": 4}))
        monkeypatch.setenv("ASKTABLE_BEAM_WIDTH", "16")
        monkeypatch.setenv("ASKTABLE_TAU_FN", "0.6")
        config = EngineConfig.from_sources(config_file)
        assert config.reference_year == 2015  # from file
        assert config.beam_width == 16  # env wins
        assert config.tau_fn == 0.6

    def test_env_config_path(self, tmp_path, monkeypatch):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"port": 9999}))
        monkeypatch.setenv("ASKTABLE_CONFIG", str(config_file))
        assert EngineConfig.from_sources().port == 9999

    def test_defaults_without_sources(self, monkeypatch):
        for key in list(__import__("os").environ):
            if key.startswith("ASKTABLE_"):
                monkeypatch.delenv(key)
        config = EngineConfig.from_sources()
        assert config.tau_fn == 0.55
        assert config.beam_width == 8
        assert config.anomaly_threshold == 2.5


class TestEnginePurity:
    def test_queries_leave_dataset_untouched(self, engine):
        before = [tuple(r) for r in engine.dataset.rows]
        engine.query("total production per state in 2010")
        engine.query("Are there anomalies in the honey production of Georgia?")
        after = [tuple(r) for r in engine.dataset.rows]
        assert before == after

    def test_identical_queries_identical_results(self, engine):
        a = engine.query("What was the price of honey in Alabama in 2010?")
        b = engine.query("What was the price of honey in Alabama in 2010?")
        assert a.answer.to_json() == b.answer.to_json()
        assert a.viz.to_dict() == b.viz.to_dict()

    def test_custom_dataset_path(self, tmp_path):
        csv = tmp_path / "mini.csv"
        csv.write_text("city,amount,year\nParis,5,2001\nParis,7,2002\n")
        engine = Engine(EngineConfig(dataset_path=str(csv), reference_year=2020))
        result = engine.query("total amount in 2002")
        assert result.answer.kind == "scalar"
        assert result.answer.value == 7.0
