"""Checking every theorem of a source file in order."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .calculus import Context
from .parser import SourceFile, TheoremDecl, parse
from .tactics import CheckResult, check_theorem


@dataclass
class CheckConfig:
    depth: int = 5
    pattern_rules: bool = True


@dataclass
class FileReport:
    path: str
    results: list[CheckResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def context_of(sf: SourceFile) -> Context:
    return Context(defs=sf.defs, lemmas={})


def check_source(sf: SourceFile, config: CheckConfig | None = None, path: str = "<input>") -> FileReport:
    config = config or CheckConfig()
    ctx = context_of(sf)
    report = FileReport(path)
    for thm in sf.theorems:
        t0 = time.perf_counter()
        res = check_theorem(thm.name, thm.formula, thm.script, ctx, sf.sig,
                            pattern_rules=config.pattern_rules, search_depth=config.depth)
        report.timings[thm.name] = time.perf_counter() - t0
        if not res.line:
            res.line = thm.line
        report.results.append(res)
        if res.ok:
            ctx.lemmas[thm.name] = thm.formula
    return report


def check_text(text: str, config: CheckConfig | None = None, path: str = "<input>") -> FileReport:
    return check_source(parse(text), config, path)


def check_file(path: str, config: CheckConfig | None = None) -> FileReport:
    with open(path, encoding="utf-8") as fh:
        return check_text(fh.read(), config, path)
