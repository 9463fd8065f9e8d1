"""Append-only table of time-indexed scalar diagnostics.

Ledgers are the human-auditable face of a run: energies, dissipation
integrals, dyadic block norms, and composite functionals, one (t, name,
value) row at a time, serialized as CSV with 17 significant digits so
re-reads are bit-faithful.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

CSV_HEADER = "t,name,value"


@dataclass
class NormLedger:
    rows: list[tuple[float, str, float]] = field(default_factory=list)
    _latest: dict[str, float] = field(default_factory=dict)

    def add(self, t: float, name: str, value: float) -> None:
        last = self._latest.get(name)
        if last is not None and t < last:
            raise ValueError(
                f"ledger rows must be time-monotone per name: {name} at t={t} after t={last}"
            )
        self.rows.append((float(t), name, float(value)))
        self._latest[name] = float(t)

    def series(self, name: str) -> tuple[list[float], list[float]]:
        ts = [t for t, n, _ in self.rows if n == name]
        vs = [v for _, n, v in self.rows if n == name]
        return ts, vs

    def names(self) -> list[str]:
        seen: dict[str, None] = {}
        for _, n, _ in self.rows:
            seen.setdefault(n)
        return list(seen)

    def write_csv(self, path: str | Path) -> None:
        lines = [CSV_HEADER]
        for t, name, value in self.rows:
            lines.append(f"{t:.17g},{name},{value:.17g}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read_csv(cls, path: str | Path) -> "NormLedger":
        ledger = cls()
        text = Path(path).read_text().strip().splitlines()
        if not text or text[0] != CSV_HEADER:
            raise ValueError(f"not a ledger CSV: {path}")
        for line in text[1:]:
            t_s, name, v_s = line.split(",", 2)
            ledger.add(float(t_s), name, float(v_s))
        return ledger
