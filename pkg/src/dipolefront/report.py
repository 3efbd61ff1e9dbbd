"""Report containers and their text/CSV renderings."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field


def fmt(v) -> str:
    """Full double precision so round trips through CSV are exact."""
    if isinstance(v, float):
        return f"{v + 0.0:.17g}"  # + 0.0 folds -0 into 0
    return str(v)


@dataclass
class TableRow:
    quantity: str
    expanding: float | None
    static: float | None
    unit: str = ""


@dataclass
class ObservableReport:
    """Named observables with units and where each number came from."""

    title: str
    params: dict[str, float] = field(default_factory=dict)
    rows: list[TableRow] = field(default_factory=list)
    source: str = "closed-form"

    def add(self, quantity, expanding, static, unit=""):
        self.rows.append(TableRow(quantity, expanding, static, unit))

    def row(self, quantity: str) -> TableRow:
        for r in self.rows:
            if r.quantity == quantity:
                return r
        raise KeyError(quantity)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "expanding", "static", "unit"])
        for r in self.rows:
            w.writerow([r.quantity, "" if r.expanding is None else fmt(r.expanding),
                        "" if r.static is None else fmt(r.static), r.unit])
        return buf.getvalue()

    def to_text(self) -> str:
        def short(v):
            if v is None:
                return "-"
            return f"{v + 0.0:.6g}" if math.isfinite(v) else str(v)

        head = ("quantity", "expanding", "static", "unit")
        body = [(r.quantity, short(r.expanding), short(r.static), r.unit) for r in self.rows]
        widths = [max(len(x[i]) for x in [head] + body) for i in range(4)]
        lines = [f"# {self.title}"]
        if self.params:
            lines.append("# " + ", ".join(f"{k} = {fmt(v)}" for k, v in self.params.items()))
        lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
        return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
