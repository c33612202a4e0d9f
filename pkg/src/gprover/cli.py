"""Command-line front end: batch checking, an interactive prover and the oracle self-test."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from .calculus import Context
from .checker import CheckConfig, FileReport, check_source, context_of
from .defs import DefinitionError
from .parser import ParseError, SourceFile, lex, parse, parse_tactic, parse_theorem_header
from .printer import show_clause
from .syntax import TypeError_
from .tactics import Certificate, ProofState, TacticError, check_certificate, start, step

EXIT_OK, EXIT_FAILED, EXIT_PARSE = 0, 1, 2


class Style:
    def __init__(self, color: bool) -> None:
        self.color = color

    def _wrap(self, code: str, s: str) -> str:
        return f"\033[{code}m{s}\033[0m" if self.color else s

    def ok(self, s: str) -> str:
        return self._wrap("32", s)

    def bad(self, s: str) -> str:
        return self._wrap("31", s)


def _use_color(args, out: TextIO) -> bool:
    return not args.no_color and hasattr(out, "isatty") and out.isatty() and "NO_COLOR" not in os.environ


def load(path: str) -> SourceFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def trace_path(out_dir: str, path: str, theorem: str, many: bool) -> Path:
    name = f"{Path(path).stem}.{theorem}.json" if many else f"{theorem}.json"
    return Path(out_dir) / name


def write_trace(cert: Certificate, target: Path) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(cert.to_json(), fh, indent=1, ensure_ascii=False)


def show_translated(sf: SourceFile, out: TextIO) -> None:
    for name, pd in sf.defs.preds.items():
        print(f"% {name} ({pd.flavor}, level {pd.level})", file=out)
        print(f"  {show_clause(pd.translated)}", file=out)


# ---------------------------------------------------------------- check

def cmd_check(args, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    style = Style(_use_color(args, out))
    config = CheckConfig(depth=args.depth, pattern_rules=not args.translated)
    status = EXIT_OK
    many = len(args.files) > 1
    for path in args.files:
        try:
            sf = load(path)
        except OSError as e:
            print(f"{path}: {e.strerror or e}", file=err)
            return EXIT_PARSE
        except ParseError as e:
            print(f"{path}:{e.line}:{e.col}: {e.msg}", file=err)
            return EXIT_PARSE
        except (DefinitionError, TypeError_) as e:
            print(f"{path}: {e}", file=err)
            return EXIT_PARSE
        if args.show_translated:
            show_translated(sf, out)
        report = check_source(sf, config, path)
        print_report(report, style, out)
        if args.json_trace:
            for r in report.results:
                if r.certificate is not None:
                    write_trace(r.certificate, trace_path(args.json_trace, path, r.name, many))
        if not report.ok:
            status = EXIT_FAILED
    return status


def print_report(report: FileReport, style: Style, out: TextIO) -> None:
    for r in report.results:
        ms = 1000 * report.timings.get(r.name, 0.0)
        if r.ok:
            print(f"{style.ok('ok')}   {report.path}: {r.name} ({ms:.1f} ms)", file=out)
        else:
            print(f"{style.bad('FAIL')} {report.path}:{r.line}:{r.col}: {r.name}: {r.error}", file=out)
            if r.goal:
                print(r.goal, file=out)
    n_ok = sum(r.ok for r in report.results)
    print(f"{report.path}: {n_ok}/{len(report.results)} theorems certified", file=out)


# ---------------------------------------------------------------- repl

@dataclass
class Repl:
    """A line-oriented proof session; `feed` returns what the session prints."""
    sf: SourceFile
    config: CheckConfig = field(default_factory=CheckConfig)
    ctx: Context = field(init=False)
    state: ProofState | None = field(default=None, init=False)
    script: list[str] = field(default_factory=list, init=False)
    certificates: dict[str, Certificate] = field(default_factory=dict, init=False)
    pending: str = field(default="", init=False)
    finished: bool = field(default=False, init=False)

    def __post_init__(self) -> None:
        self.ctx = context_of(self.sf)

    @classmethod
    def from_file(cls, path: str, config: CheckConfig | None = None) -> tuple["Repl", FileReport]:
        sf = load(path)
        r = cls(sf, config or CheckConfig())
        report = check_source(sf, r.config, path)
        for res in report.results:
            if res.ok:
                r.ctx.lemmas[res.name] = next(t.formula for t in sf.theorems if t.name == res.name)
                r.certificates[res.name] = res.certificate
        return r, report

    def feed(self, text: str) -> str:
        """Accept any amount of input; complete sentences are executed in order."""
        self.pending += text
        out = []
        for sentence in self._sentences():
            out.append(self.run(sentence))
        return "\n".join(o for o in out if o)

    def _sentences(self) -> list[str]:
        try:
            toks = lex(self.pending)
        except ParseError:
            return []
        done, start = [], 0
        for t in toks:
            if t.kind == "sym" and t.text == ".":
                done.append(self.pending[start:t.pos + 1].strip())
                start = t.pos + 1
        self.pending = self.pending[start:]
        return done

    def run(self, sentence: str) -> str:
        words = sentence.rstrip(".").split()
        if not words:
            return ""
        head = words[0]
        try:
            if head == "Theorem":
                return self.begin(sentence)
            if head in ("Quit", "quit"):
                self.finished = True
                return ""
            if head == "Qed":
                return self.qed()
            if head in ("Abort", "abort"):
                self.state, self.script = None, []
                return "Proof aborted."
            if head in ("undo", "Undo"):
                return self.undo()
            if head in ("show", "Show"):
                return self.goal_text()
            if self.state is None:
                return "Error: no theorem in progress (start one with Theorem name : formula.)"
            tac = parse_tactic(sentence)
            step(self.state, tac)
            self.script.append(sentence)
            return self.goal_text()
        except ParseError as e:
            return f"Parse error: {e}"
        except TacticError as e:
            return f"Error: {e}"

    def begin(self, sentence: str) -> str:
        if self.state is not None:
            return f"Error: finish or abort {self.state.name} first"
        name, formula = parse_theorem_header(sentence, self.sf.sig)
        if name in self.ctx.lemmas:
            return f"Error: {name} is already proved"
        self.state = start(name, formula, self.ctx, self.sf.sig, self.config.pattern_rules,
                           self.config.depth)
        self.script = []
        return self.goal_text()

    def undo(self) -> str:
        if self.state is None or not self.script:
            return "Error: nothing to undo"
        keep = self.script[:-1]
        st = self.state
        self.state = start(st.name, st.formula, self.ctx, self.sf.sig, self.config.pattern_rules,
                           self.config.depth)
        self.script = []
        for s in keep:
            step(self.state, parse_tactic(s))
            self.script.append(s)
        return self.goal_text()

    def qed(self) -> str:
        if self.state is None:
            return "Error: no theorem in progress"
        if not self.state.done:
            return f"Error: {len(self.state.goals)} subgoal(s) remain"
        cert = self.state.certificate()
        check_certificate(cert, self.ctx)
        self.certificates[cert.theorem] = cert
        self.ctx.lemmas[cert.theorem] = cert.formula
        self.state, self.script = None, []
        return f"{cert.theorem} certified."

    def goal_text(self) -> str:
        if self.state is None:
            return ""
        return self.state.show_goal()


def cmd_repl(args, inp: TextIO | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    inp, out, err = inp or sys.stdin, out or sys.stdout, err or sys.stderr
    style = Style(_use_color(args, out))
    config = CheckConfig(depth=args.depth, pattern_rules=not args.translated)
    try:
        repl, report = Repl.from_file(args.file, config)
    except OSError as e:
        print(f"{args.file}: {e.strerror or e}", file=err)
        return EXIT_PARSE
    except ParseError as e:
        print(f"{args.file}:{e.line}:{e.col}: {e.msg}", file=err)
        return EXIT_PARSE
    except (DefinitionError, TypeError_) as e:
        print(f"{args.file}: {e}", file=err)
        return EXIT_PARSE
    if args.show_translated:
        show_translated(repl.sf, out)
    print_report(report, style, out)
    interactive = hasattr(inp, "isatty") and inp.isatty()
    while not repl.finished:
        if interactive:
            out.write("> " if repl.state is None else f"{repl.state.name}> ")
            out.flush()
        line = inp.readline()
        if not line:
            break
        shown = repl.feed(line)
        if shown:
            print(shown, file=out)
    if args.json_trace:
        for name, cert in repl.certificates.items():
            write_trace(cert, trace_path(args.json_trace, args.file, name, False))
    return EXIT_OK


# ---------------------------------------------------------------- selftest

def cmd_selftest(args, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    from .selftest import SuiteConfig, run_all
    style = Style(_use_color(args, out))
    cfg = SuiteConfig(seed=args.seed, csnas_cases=args.csnas_cases, algebra_cases=args.algebra_cases)
    ok = True
    for r in run_all(cfg):
        line = r.line()
        print(style.ok(line) if r.ok else style.bad(line), file=out)
        for f in r.failures[:5]:
            print(f"    {f}", file=out)
        ok = ok and r.ok
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=5, metavar="N", help="default search depth (5)")
    common.add_argument("--json-trace", metavar="DIR", help="write one JSON rule trace per certified theorem")
    common.add_argument("--no-color", action="store_true", help="plain output")
    common.add_argument("--translated", action="store_true",
                        help="use translated definitions with defL/defR and nominal abstraction rules")
    common.add_argument("--show-translated", action="store_true",
                        help="print the single-clause translation of every definition")

    p = argparse.ArgumentParser(prog="gprover", description="Proof checker for the logic G.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", parents=[common], help="check theorem files")
    c.add_argument("files", nargs="+", metavar="FILE")
    r = sub.add_parser("repl", parents=[common], help="interactive proving against a file's declarations")
    r.add_argument("file", metavar="FILE")
    s = sub.add_parser("selftest", help="run the randomized oracle suites")
    s.add_argument("--seed", type=int, default=42, metavar="N")
    s.add_argument("--no-color", action="store_true")
    s.add_argument("--csnas-cases", type=int, default=500, metavar="N")
    s.add_argument("--algebra-cases", type=int, default=1000, metavar="N")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "repl":
        return cmd_repl(args)
    return cmd_selftest(args)


if __name__ == "__main__":
    sys.exit(main())
