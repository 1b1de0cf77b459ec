"""The oracle must be able to fail: feed it deliberately wrong lineage and
make sure violations surface, so a green criterion run means something."""

from lineage_forge.catalog import Catalog, ColumnRef
from lineage_forge.engine import Engine, OutputColumn, QueryLineage
from lineage_forge.frontend.parser import parse_query_text
from lineage_forge.registry import QueryDictionary

from difforacle import build_db, check_suite, perturb, run_query
from randgen import TOY_TABLES, toy_rows, toy_schema

SQL = "SELECT p_name AS c1 FROM people WHERE p_age > 3"


def real_lineage(sql):
    catalog = Catalog()
    for relation, columns in toy_schema().items():
        catalog.declare(relation, columns)
    return Engine(QueryDictionary(), catalog).extract("q", parse_query_text(sql))


def test_correct_lineage_passes():
    assert check_suite([(SQL, real_lineage(SQL))]) == []


def test_missing_contributor_is_caught():
    fake = QueryLineage(
        query_id="fake",
        tables=frozenset({"people"}),
        outputs=(OutputColumn("c1", frozenset()),),
        referenced=frozenset({ColumnRef("people", "p_age")}),
    )
    violations = check_suite([(SQL, fake)])
    assert any("people.p_name" in v for v in violations)


def test_missing_reference_is_caught():
    fake = QueryLineage(
        query_id="fake",
        tables=frozenset({"people"}),
        outputs=(OutputColumn("c1", frozenset({ColumnRef("people", "p_name")})),),
        referenced=frozenset(),
    )
    violations = check_suite([(SQL, fake)])
    assert any("people.p_age" in v for v in violations)


def test_wrong_output_names_are_caught():
    lineage = real_lineage("SELECT p_name AS wrong FROM people WHERE p_age > 3")
    violations = check_suite([(SQL, lineage)])
    assert any("output names" in v for v in violations)


def test_perturb_changes_exactly_one_column():
    rows = toy_rows()
    changed = perturb(rows, "people", 1)
    for table in rows:
        if table != "people":
            assert changed[table] == rows[table]
    for before, after in zip(rows["people"], changed["people"]):
        assert after[1] == "~" + before[1]
        assert before[0] == after[0] and before[2:] == after[2:]


def test_toy_data_is_deterministic_and_small():
    assert toy_rows() == toy_rows()
    assert 3 <= len(TOY_TABLES) <= 5
    for table, rows in toy_rows().items():
        assert len(rows) <= 50, table


def test_run_query_multisets_ignore_order():
    conn = build_db(toy_rows())
    _, unordered = run_query(conn, "SELECT p_id, p_age FROM people")
    _, ordered = run_query(conn, "SELECT p_id, p_age FROM people ORDER BY p_age")
    conn.close()
    assert unordered == ordered
