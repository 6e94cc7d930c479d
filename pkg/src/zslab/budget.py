"""Search budgets: node-count and wall-clock caps shared by all searches."""

from __future__ import annotations

import time
from dataclasses import dataclass

from zslab.errors import ResourceLimit


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int | None = None
    max_seconds: float | None = None


class BudgetClock:
    """Counts search nodes and enforces a budget; time is checked every 1024 nodes."""

    def __init__(self, budget: SearchBudget | None):
        self.budget = budget or SearchBudget()
        self.nodes = 0
        self.start = time.perf_counter()

    def tick(self):
        self.nodes += 1
        b = self.budget
        if b.max_nodes is not None and self.nodes > b.max_nodes:
            raise ResourceLimit("node budget exhausted")
        if b.max_seconds is not None and self.nodes % 1024 == 0:
            if time.perf_counter() - self.start > b.max_seconds:
                raise ResourceLimit("time budget exhausted")

    @property
    def seconds(self) -> float:
        return time.perf_counter() - self.start
