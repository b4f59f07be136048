from qaction.report.records import (
    SCHEMA_VERSION,
    ResultRecord,
    Table,
    Verdict,
    encode_value,
    table_from_rows,
)

__all__ = [
    "SCHEMA_VERSION",
    "ResultRecord",
    "Table",
    "Verdict",
    "encode_value",
    "table_from_rows",
]
