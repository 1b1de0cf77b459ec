import random

from lineage_forge.diagnostics import SEVERITY_ERROR, SEVERITY_INFO, SEVERITY_WARNING
from lineage_forge.pipeline import analyze_files, analyze_script, analyze_sources


def codes(result):
    return [d.code for d in result.diagnostics]


def severity_of(result, code):
    return [d.severity for d in result.diagnostics if d.code == code]


# -- registration --------------------------------------------------------------


def test_views_register_under_their_names():
    result = analyze_script(
        "CREATE VIEW v AS SELECT a FROM t; CREATE TABLE snap AS SELECT a FROM t"
    )
    assert result.registry.ids() == ["v", "snap"]
    assert result.graph.nodes["v"].kind == "view"
    assert result.graph.nodes["snap"].kind == "view"


def test_bare_select_takes_file_stem():
    result = analyze_script("SELECT a FROM t", source_name="Daily_Report.sql")
    assert result.registry.ids() == ["daily_report"]
    assert result.graph.nodes["daily_report"].kind == "query"


def test_second_bare_select_gets_generated_id():
    result = analyze_script(
        "SELECT a FROM t; SELECT b FROM u", source_name="report.sql"
    )
    assert result.registry.ids() == ["report", "query_0"]


def test_bare_select_without_source_name_gets_generated_id():
    result = analyze_script("SELECT a FROM t")
    assert result.registry.ids() == ["query_0"]


def test_stem_collision_with_view_warns_and_falls_back():
    result = analyze_script(
        "CREATE VIEW report AS SELECT a FROM t; SELECT b FROM u",
        source_name="report.sql",
    )
    assert result.registry.ids() == ["report", "query_0"]
    assert "duplicate-identifier" in codes(result)
    assert severity_of(result, "duplicate-identifier") == [SEVERITY_WARNING]


def test_generated_ids_skip_taken_names():
    result = analyze_script(
        "CREATE VIEW query_0 AS SELECT a FROM t; SELECT b FROM u; SELECT c FROM w"
    )
    assert result.registry.ids() == ["query_0", "query_1", "query_2"]


def test_random_ids_are_seeded():
    first = analyze_script(
        "SELECT a FROM t", random_ids=True, rng=random.Random(3)
    )
    second = analyze_script(
        "SELECT a FROM t", random_ids=True, rng=random.Random(3)
    )
    assert first.registry.ids() == second.registry.ids()
    assert first.registry.ids()[0].startswith("query_")
    assert first.registry.ids()[0] != "query_0"


def test_duplicate_view_is_an_error_and_first_wins():
    result = analyze_script(
        "CREATE VIEW v AS SELECT a AS x FROM t;"
        "CREATE VIEW v AS SELECT b AS y FROM u"
    )
    assert severity_of(result, "duplicate-identifier") == [SEVERITY_ERROR]
    assert result.graph.nodes["v"].columns == ["x"]


def test_create_or_replace_replaces_and_notes():
    result = analyze_script(
        "CREATE VIEW v AS SELECT a AS x FROM t;"
        "CREATE OR REPLACE VIEW v AS SELECT b AS y FROM u"
    )
    assert severity_of(result, "replaced-view") == [SEVERITY_INFO]
    assert result.graph.nodes["v"].columns == ["y"]


def test_replace_without_prior_definition_is_silent():
    result = analyze_script("CREATE OR REPLACE VIEW v AS SELECT a FROM t")
    assert "replaced-view" not in codes(result)


# -- error tolerance -------------------------------------------------------------


def test_unsupported_statement_is_skipped_with_warning():
    result = analyze_script(
        "INSERT INTO t VALUES (1); CREATE VIEW v AS SELECT a FROM t"
    )
    assert "unsupported-statement" in codes(result)
    assert "v" in result.registry


def test_parse_error_is_skipped_with_warning():
    result = analyze_script(
        "CREATE VIEW broken AS SELECT FROM; CREATE VIEW v AS SELECT a FROM t"
    )
    assert "parse-error" in codes(result)
    assert "broken" not in result.registry
    assert "v" in result.registry


def test_strict_elevates_parse_and_unsupported():
    result = analyze_script(
        "INSERT INTO t VALUES (1); SELECT FROM;", strict=True
    )
    for code in ("unsupported-statement", "parse-error"):
        assert severity_of(result, code) == [SEVERITY_ERROR]
    # elevation happens before the merge, so the graph carries it too
    graph_codes = {d.code: d.severity for d in result.graph.diagnostics}
    assert graph_codes["parse-error"] == SEVERITY_ERROR


def test_non_strict_keeps_warnings():
    result = analyze_script("INSERT INTO t VALUES (1)")
    assert severity_of(result, "unsupported-statement") == [SEVERITY_WARNING]


# -- schema and files ---------------------------------------------------------------


def test_schema_declarations_flow_to_catalog():
    result = analyze_script(
        "CREATE VIEW v AS SELECT * FROM t", schema={"t": ["a", "b"]}
    )
    assert result.graph.nodes["v"].columns == ["a", "b"]
    assert result.catalog.provenance_of("t") == "declared"


def test_analyze_files(tmp_path):
    first = tmp_path / "views.sql"
    first.write_text("CREATE VIEW v AS SELECT x FROM report")
    second = tmp_path / "report.sql"
    second.write_text("SELECT a AS x FROM t")
    result = analyze_files([str(first), str(second)])
    assert set(result.registry.ids()) == {"v", "report"}
    # the view resolves against the bare query registered from the file stem
    assert {str(r) for r in result.schedule.lineages["v"].contributors_of("x")} == {
        "report.x"
    }
    assert result.schedule.deferrals == [("v", "report")]


def test_analyze_sources_multiple_scripts():
    result = analyze_sources(
        [
            ("a.sql", "CREATE VIEW one AS SELECT a FROM t"),
            (None, "CREATE VIEW two AS SELECT b FROM one"),
        ]
    )
    assert result.schedule.order == ["one", "two"]


def test_result_exposes_all_layers():
    result = analyze_script("CREATE VIEW v AS SELECT a FROM t")
    assert result.graph.has_column
    assert "v" in result.registry
    assert result.catalog.is_complete("v")
    assert result.schedule.order == ["v"]
    assert result.diagnostics == result.graph.diagnostics
