"""Command-line harness: run automata operations and benchmark pipelines.

Inputs are .mata files (bit-vector automata are mintermized on load) or
inline ``regex:PATTERN`` arguments. Operation wall times are measured
around the operation only; parsing is never included. Every operation runs
in a forked worker so per-job timeouts can be enforced.
"""

from __future__ import annotations

import argparse
import csv
import io
import multiprocessing
import re
import shlex
import statistics
import sys
import time
from dataclasses import dataclass
from multiprocessing.connection import wait as connection_wait

from . import __version__
from . import algorithms as alg
from . import formats
from . import inclusion as incl
from .core import Alphabet, AutomataError, Nfa
from .regex import compile_regex

ARITY = {
    "complement": 1,
    "intersection": 2,
    "union": 2,
    "concat": 2,
    "trim": 1,
    "emptiness": 1,
    "membership": 1,
    "inclusion": 2,
    "universality": 1,
    "determinize": 1,
    "reduce-sim": 1,
    "minterm": 1,
    "revert": 1,
}

VERDICT_OPS = {"emptiness", "membership", "inclusion", "universality"}

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_TIMEOUT = 3

CSV_FIELDS = [
    "job_id",
    "operation",
    "inputs",
    "status",
    "time_us",
    "states_out",
    "transitions_out",
    "verdict",
]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nfakit",
        description="Run finite-automata operations on .mata files and inline regexes.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("operation", choices=sorted(ARITY) + ["bench"])
    p.add_argument(
        "inputs",
        nargs="*",
        help=".mata paths or regex:PATTERN (bench: a jobs file)",
    )
    p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")
    p.add_argument("--format", choices=["mata", "dot"], default="mata")
    p.add_argument(
        "--alphabet",
        metavar="SYMS",
        help="symbol names (space or comma separated) for complement/universality",
    )
    p.add_argument("--word", metavar="WORD", help="word for the membership test")
    p.add_argument("--timeout", type=int, default=60000, metavar="MS")
    p.add_argument("--policy", choices=["min-size", "fifo"], default="min-size")
    p.add_argument("--strict", action="store_true", help="exit 1 on a false verdict")
    p.add_argument("--repeat", type=int, default=1, metavar="K",
                   help="bench: report the median of K runs per job")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="bench: run N jobs in parallel")
    return p


class _JobLineParser(argparse.ArgumentParser):
    def error(self, message):
        raise AutomataError(message)


def _build_job_line_parser() -> argparse.ArgumentParser:
    p = _JobLineParser(prog="job", add_help=False)
    p.add_argument("operation", choices=sorted(ARITY))
    p.add_argument("inputs", nargs="*")
    p.add_argument("--alphabet")
    p.add_argument("--word")
    p.add_argument("--timeout", type=int)
    p.add_argument("--policy", choices=["min-size", "fifo"])
    return p


# ---------------------------------------------------------------------------
# input handling

def _byte_symbol_name(b: int) -> str:
    if 33 <= b <= 126 and b != ord("#"):
        return chr(b)
    return f"x{b:02x}"


def _relabel_symbols(nfa: Nfa, mapping: dict[int, int], alphabet: Alphabet) -> Nfa:
    eps = nfa.epsilon_symbols()
    out = Nfa(
        num_states=nfa.num_states(),
        initial=nfa.initial,
        final=nfa.final,
        alphabet=alphabet,
        num_epsilons=nfa.num_epsilons,
    )
    for s, a, t in nfa.transitions():
        out.delta.add(s, a if a in eps else mapping[a], t)
    return out


def load_inputs(input_args: list[str], alphabet: Alphabet) -> list[Nfa]:
    """Materialize every input automaton over one shared alphabet.

    Bit-vector entries across all inputs are mintermized together so their
    minterm symbols mean the same thing in every operand.
    """
    parsed: list[tuple[str, object]] = []
    bits_labels: list[str] = []
    for arg in input_args:
        if arg.startswith("regex:"):
            parsed.append(("regex", arg[len("regex:"):]))
            continue
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
        for entry in formats.parse_mata(text):
            parsed.append(("entry", entry))
            if entry.kind is formats.AutomatonKind.BITS:
                bits_labels.extend(label for _, label, _ in entry.transitions)
    shared = None
    if bits_labels:
        shared = formats.mintermize(list(dict.fromkeys(bits_labels)))
    autos: list[Nfa] = []
    for kind, payload in parsed:
        if kind == "regex":
            nfa = compile_regex(payload)
            eps = nfa.epsilon_symbols()
            mapping = {
                b: alphabet.translate(_byte_symbol_name(b))
                for b in sorted(nfa.used_symbols() - eps)
            }
            autos.append(_relabel_symbols(nfa, mapping, alphabet))
        else:
            entry = payload
            if entry.kind is formats.AutomatonKind.EXPLICIT:
                autos.append(formats.to_nfa_explicit(entry, alphabet))
            else:
                nfa, result = formats.to_nfa_bits(entry, shared=shared)
                mapping = {
                    m.symbol: alphabet.translate(f"m{m.symbol}")
                    for m in result.minterms
                }
                autos.append(_relabel_symbols(nfa, mapping, alphabet))
    return autos


def resolve_alphabet(spec: str | None, operation: str, autos: list[Nfa],
                     alphabet: Alphabet) -> list[int]:
    if spec:
        names = [t for t in re.split(r"[\s,]+", spec.strip()) if t]
        return sorted({alphabet.translate(n) for n in names})
    symbols: set[int] = set()
    for nfa in autos:
        symbols |= nfa.used_symbols() - nfa.epsilon_symbols()
    print(
        f"notice: --alphabet not given; {operation} uses the symbols present "
        "in the input",
        file=sys.stderr,
    )
    return sorted(symbols)


def resolve_word(text: str | None, alphabet: Alphabet) -> list[int]:
    if not text:
        return []
    tokens = text.split()
    if tokens and all(t in alphabet for t in tokens):
        return [alphabet.lookup(t) for t in tokens]
    if all(c in alphabet for c in text):
        return [alphabet.lookup(c) for c in text]
    raise AutomataError(f"cannot resolve word {text!r} against the input alphabet")


def _symbol_display(symbol: int, alphabet: Alphabet | None) -> str:
    if alphabet is not None and alphabet.has_symbol(symbol):
        return alphabet.name_of(symbol)
    return f"a{symbol}"


# ---------------------------------------------------------------------------
# operation execution

@dataclass
class OpResult:
    nfa: Nfa | None = None
    verdict: bool | None = None
    witness: list[int] | None = None


def run_operation(
    operation: str,
    autos: list[Nfa],
    alphabet_symbols: list[int] | None = None,
    word: list[int] | None = None,
    policy: str = "min-size",
) -> OpResult:
    """Execute one already-parsed job; this is the timed region."""
    if operation == "complement":
        return OpResult(nfa=alg.complement(autos[0], alphabet_symbols))
    if operation == "intersection":
        return OpResult(nfa=alg.intersection(autos[0], autos[1])[0])
    if operation == "union":
        return OpResult(nfa=alg.union(autos[0], autos[1]))
    if operation == "concat":
        return OpResult(nfa=alg.concatenate(autos[0], autos[1]))
    if operation == "trim":
        return OpResult(nfa=alg.trim(autos[0])[0])
    if operation == "determinize":
        return OpResult(nfa=alg.determinize(autos[0])[0])
    if operation == "revert":
        return OpResult(nfa=alg.revert(autos[0]))
    if operation == "reduce-sim":
        return OpResult(nfa=incl.reduce_simulation(autos[0])[0])
    if operation == "minterm":
        return OpResult(nfa=autos[0])  # conversion already happened at load
    if operation == "emptiness":
        empty, witness = alg.is_lang_empty(autos[0])
        return OpResult(verdict=empty, witness=witness)
    if operation == "membership":
        return OpResult(verdict=alg.is_in_lang(autos[0], word or []))
    if operation == "inclusion":
        holds, cex = incl.is_included(autos[0], autos[1], policy=policy)
        return OpResult(verdict=holds, witness=cex)
    if operation == "universality":
        holds, cex = incl.is_universal(autos[0], alphabet_symbols, policy=policy)
        return OpResult(verdict=holds, witness=cex)
    raise AutomataError(f"unknown operation {operation!r}")


def _render_payload(result: OpResult, fmt: str, alphabet: Alphabet | None) -> dict:
    if result.nfa is not None:
        if fmt == "dot":
            text = formats.to_dot(result.nfa, alphabet)
        else:
            text = formats.serialize_mata(result.nfa, alphabet)
        return {
            "kind": "nfa",
            "text": text,
            "states": result.nfa.num_states(),
            "transitions": result.nfa.num_transitions(),
        }
    witness = None
    if result.witness is not None:
        witness = [_symbol_display(s, alphabet) for s in result.witness]
    return {"kind": "verdict", "verdict": result.verdict, "witness": witness}


def _worker(conn, operation, autos, opts, fmt, alphabet):
    try:
        t0 = time.perf_counter_ns()
        result = run_operation(operation, autos, **opts)
        elapsed_us = (time.perf_counter_ns() - t0) // 1000
        conn.send(("ok", elapsed_us, _render_payload(result, fmt, alphabet)))
    except Exception as exc:  # all failures become error records
        conn.send(("error", 0, f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


@dataclass
class Execution:
    status: str  # ok | timeout | error
    time_us: int
    payload: object  # dict for ok, message for error, None for timeout


class _ActiveRun:
    """A forked worker plus its receive pipe and deadline."""

    def __init__(self, key, operation, autos, opts, fmt, alphabet, timeout_ms):
        ctx = multiprocessing.get_context("fork")
        self.key = key
        recv_conn, send_conn = ctx.Pipe(duplex=False)
        self.conn = recv_conn
        self.proc = ctx.Process(
            target=_worker, args=(send_conn, operation, autos, opts, fmt, alphabet)
        )
        self.started = time.monotonic()
        self.deadline = self.started + timeout_ms / 1000.0
        self.proc.start()
        send_conn.close()

    def finish(self) -> Execution:
        try:
            status, time_us, payload = self.conn.recv()
        except EOFError:
            status, time_us, payload = "error", 0, "worker terminated unexpectedly"
        self.proc.join()
        self.conn.close()
        return Execution(status, time_us, payload)

    def kill(self) -> Execution:
        self.proc.terminate()
        self.proc.join()
        self.conn.close()
        elapsed_us = int((time.monotonic() - self.started) * 1_000_000)
        return Execution("timeout", elapsed_us, None)


def execute(operation, autos, opts, fmt, alphabet, timeout_ms) -> Execution:
    run = _ActiveRun(None, operation, autos, opts, fmt, alphabet, timeout_ms)
    if run.conn.poll(timeout_ms / 1000.0):
        return run.finish()
    return run.kill()


# ---------------------------------------------------------------------------
# the run command

def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    operation = args.operation
    alphabet = Alphabet()
    autos = load_inputs(args.inputs, alphabet)
    if len(autos) != ARITY[operation]:
        raise AutomataError(
            f"{operation} expects {ARITY[operation]} automat"
            f"{'on' if ARITY[operation] == 1 else 'a'}, got {len(autos)}"
        )
    opts: dict = {}
    if operation in ("complement", "universality"):
        opts["alphabet_symbols"] = resolve_alphabet(
            args.alphabet, operation, autos, alphabet
        )
    if operation == "membership":
        opts["word"] = resolve_word(args.word, alphabet)
    if operation in ("inclusion", "universality"):
        opts["policy"] = args.policy
    ex = execute(operation, autos, opts, args.format, alphabet, args.timeout)
    if ex.status == "timeout":
        print(f"error: timeout after {args.timeout} ms", file=sys.stderr)
        return EXIT_TIMEOUT
    if ex.status == "error":
        print(f"error: {ex.payload}", file=sys.stderr)
        return EXIT_ERROR
    payload = ex.payload
    if payload["kind"] == "nfa":
        _emit(payload["text"], args.out)
        return EXIT_OK
    lines = ["true" if payload["verdict"] else "false"]
    if payload["witness"] is not None:
        label = "witness" if operation == "emptiness" else "counterexample"
        lines.append(f"{label}: {' '.join(payload['witness'])}".rstrip())
    _emit("\n".join(lines) + "\n", args.out)
    if args.strict and not payload["verdict"]:
        return EXIT_NEGATIVE
    return EXIT_OK


# ---------------------------------------------------------------------------
# the bench command

@dataclass
class Job:
    job_id: int
    operation: str
    inputs: list[str]
    alphabet: str | None
    word: str | None
    policy: str
    timeout_ms: int


def parse_jobs_file(path: str, defaults) -> list[Job]:
    parser = _build_job_line_parser()
    jobs: list[Job] = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            spec = parser.parse_args(shlex.split(line))
            jobs.append(
                Job(
                    job_id=len(jobs) + 1,
                    operation=spec.operation,
                    inputs=spec.inputs,
                    alphabet=spec.alphabet if spec.alphabet else defaults.alphabet,
                    word=spec.word if spec.word else defaults.word,
                    policy=spec.policy or defaults.policy,
                    timeout_ms=spec.timeout if spec.timeout else defaults.timeout,
                )
            )
    return jobs


def _prepare_job(job: Job):
    """Parse a job's inputs; everything here is outside the timed region."""
    alphabet = Alphabet()
    autos = load_inputs(job.inputs, alphabet)
    if len(autos) != ARITY[job.operation]:
        raise AutomataError(
            f"{job.operation} expects {ARITY[job.operation]} inputs, got {len(autos)}"
        )
    opts: dict = {}
    if job.operation in ("complement", "universality"):
        symbols: set[int] = set()
        for nfa in autos:
            symbols |= nfa.used_symbols() - nfa.epsilon_symbols()
        if job.alphabet:
            names = [t for t in re.split(r"[\s,]+", job.alphabet.strip()) if t]
            symbols = {alphabet.translate(n) for n in names}
        opts["alphabet_symbols"] = sorted(symbols)
    if job.operation == "membership":
        opts["word"] = resolve_word(job.word, alphabet)
    if job.operation in ("inclusion", "universality"):
        opts["policy"] = job.policy
    return autos, opts, alphabet


def _aggregate(executions: list[Execution]) -> Execution:
    ok_times = [e.time_us for e in executions if e.status == "ok"]
    for status in ("timeout", "error"):
        for e in executions:
            if e.status == status:
                return Execution(status, e.time_us, e.payload)
    return Execution(
        "ok", int(statistics.median(ok_times)), executions[0].payload
    )


def _job_row(job: Job, ex: Execution) -> dict:
    row = {
        "job_id": job.job_id,
        "operation": job.operation,
        "inputs": ";".join(job.inputs),
        "status": ex.status,
        "time_us": ex.time_us if ex.status != "error" else "",
        "states_out": "",
        "transitions_out": "",
        "verdict": "",
    }
    if ex.status == "ok":
        payload = ex.payload
        if payload["kind"] == "nfa":
            row["states_out"] = payload["states"]
            row["transitions_out"] = payload["transitions"]
        else:
            row["verdict"] = "true" if payload["verdict"] else "false"
    return row


def cmd_bench(args) -> int:
    if len(args.inputs) != 1:
        raise AutomataError("bench expects exactly one jobs file")
    jobs = parse_jobs_file(args.inputs[0], args)
    repeat = max(args.repeat, 1)
    parallel = max(args.jobs, 1)
    units = [(job, k) for job in jobs for k in range(repeat)]
    results: dict[tuple[int, int], Execution] = {}
    queue = list(reversed(units))
    active: list[_ActiveRun] = []
    while queue or active:
        while queue and len(active) < parallel:
            job, k = queue.pop()
            try:
                autos, opts, alphabet = _prepare_job(job)
            except Exception as exc:
                results[(job.job_id, k)] = Execution(
                    "error", 0, f"{type(exc).__name__}: {exc}"
                )
                continue
            active.append(
                _ActiveRun(
                    (job.job_id, k), job.operation, autos, opts, "mata",
                    alphabet, job.timeout_ms,
                )
            )
        if not active:
            continue
        now = time.monotonic()
        next_deadline = min(run.deadline for run in active)
        ready = connection_wait(
            [run.conn for run in active], max(next_deadline - now, 0)
        )
        ready_set = set(ready)
        now = time.monotonic()
        still_active = []
        for run in active:
            if run.conn in ready_set:
                results[run.key] = run.finish()
            elif run.deadline <= now:
                results[run.key] = run.kill()
            else:
                still_active.append(run)
        active = still_active
    rows = []
    for job in jobs:
        executions = [results[(job.job_id, k)] for k in range(repeat)]
        rows.append(_job_row(job, _aggregate(executions)))
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _emit(buffer.getvalue(), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.operation == "bench":
            return cmd_bench(args)
        return cmd_run(args)
    except (AutomataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
