"""Static column-level SQL lineage extraction.

Parse SQL scripts without touching a database, register every view and
query they define, extract per-query column lineage with automatic
resolution of view dependencies, and merge the results into one graph
that supports impact analysis and an interactive explorer.
"""

from .catalog import Catalog, ColumnRef, UnresolvedStar, load_schema_file, parse_schema_text
from .diagnostics import Diagnostic
from .engine import Deferred, Engine, OutputColumn, QueryLineage
from .graph import LineageGraph, UnknownColumn, UnknownRelation, merge
from .pipeline import PipelineResult, analyze_files, analyze_script, analyze_sources
from .registry import DuplicateIdentifier, QueryDictionary
from .scheduler import ScheduleResult, run_all

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "ColumnRef",
    "Deferred",
    "Diagnostic",
    "DuplicateIdentifier",
    "Engine",
    "LineageGraph",
    "OutputColumn",
    "PipelineResult",
    "QueryDictionary",
    "QueryLineage",
    "ScheduleResult",
    "UnknownColumn",
    "UnknownRelation",
    "UnresolvedStar",
    "analyze_files",
    "analyze_script",
    "analyze_sources",
    "load_schema_file",
    "merge",
    "parse_schema_text",
    "run_all",
    "__version__",
]
