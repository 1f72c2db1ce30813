"""
Centralised table styling for ``kb --pretty`` output.

Every human-readable table the CLI prints goes through this module so
column order, number formatting and status markers look the same for
invariants, library verification and classifier verdicts.

Usage:

```python
import styles
print(styles.render(styles.invariant_table(payload)))
```

JSON output never passes through here; it is the stable machine format.
"""
from __future__ import annotations

import json
from typing import Mapping

import pandas as pd

from diagram import LaurentPolynomial

STATUS_MARKS = {"pass": "ok", "fail": "FAIL", "error": "ERROR", "skipped": "-"}


def _polynomial(doc: Mapping[str, int], variable: str) -> str:
    return str(LaurentPolynomial.from_dict({int(k): int(v) for k, v in doc.items()}, variable))


def _cell(name: str, value) -> str:
    if name == "alexander" and isinstance(value, Mapping):
        return _polynomial(value, "t")
    if name == "jones" and isinstance(value, Mapping):
        return _polynomial(value, "q")
    if name == "linking":
        return "; ".join(" ".join(f"{x:>3}" for x in row) for row in value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def kh_table(triples) -> pd.DataFrame:
    """Khovanov ranks pivoted into a homological (columns) by quantum (rows) grid."""
    frame = pd.DataFrame(triples, columns=["h", "q", "rank"])
    if frame.empty:
        return frame
    grid = frame.pivot_table(index="q", columns="h", values="rank", aggfunc="sum", fill_value=0)
    return grid.sort_index(ascending=False)


def invariant_table(payload: Mapping[str, object]) -> pd.DataFrame:
    rows = [{"invariant": name, "value": _cell(name, value)}
            for name, value in sorted(payload.items()) if name != "kh"]
    return pd.DataFrame(rows, columns=["invariant", "value"])


def verification_table(table: pd.DataFrame) -> pd.DataFrame:
    out = table.copy()
    out["status"] = out["status"].map(lambda s: STATUS_MARKS.get(s, s))
    return out[["entry", "invariant", "status", "expected", "computed", "provenance"]]


def verdict_table(verdict: Mapping) -> pd.DataFrame:
    rows = [{"case": imp["case"], "subject": imp["subject"], "route": imp["route"],
             "conditional": "yes" if imp["conditional"] else "no", "statement": imp["statement"]}
            for imp in verdict.get("implications", [])]
    return pd.DataFrame(rows, columns=["case", "subject", "route", "conditional", "statement"])


def render(frame: pd.DataFrame, title: str | None = None) -> str:
    with pd.option_context("display.max_colwidth", 80, "display.width", 160):
        body = frame.to_string(index=frame.index.name is not None) if not frame.empty else "(empty)"
    return f"{title}\n{body}" if title else body
