"""Command-line entry points: learn, mutate, bench, compare."""

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .adaptive import ABLATIONS, AdaptiveLSharp
from .dot import DotError, read_dot, write_dot
from .learner import RULES, PreconditionError, StepLimitExceeded
from .mealy import MealyError
from .mutations import OPERATORS, MutationError, MutationSpec, mutate
from .obstree import AdequacyError, NondeterminismError, tree_to_dot
from .oracle import RunMetrics, Teacher, WpParams, make_oracle

EXIT_OK, EXIT_USAGE, EXIT_LEARNING, EXIT_INTERNAL = 0, 1, 2, 3

CSV_COLUMNS = [
    "sul", "refs", "algorithm", "seed", "oq_count", "eq_count",
    "input_symbols_oq", "input_symbols_eq", "total_inputs", "learned_states",
] + list(RULES)


class UsageError(ValueError):
    pass


def _split(text, sep=","):
    return [x.strip() for x in text.split(sep) if x.strip()] if text else []


def parse_seeds(text):
    """``"5"`` means seeds 0..4; ``"3,7,9"`` (or a single ``"[4]"``) lists them."""
    text = str(text).strip()
    if text.startswith("[") and text.endswith("]"):
        return [int(x) for x in _split(text[1:-1])]
    if "," in text:
        return [int(x) for x in _split(text)]
    n = int(text)
    if n < 0:
        raise UsageError("seed count must be non-negative")
    return list(range(n))


def format_seeds(seeds):
    return "[" + ",".join(map(str, seeds)) + "]"


@dataclass
class RunConfig:
    sul: str = ""
    refs: list = field(default_factory=list)
    algorithm: str = "full"
    oracle: str = "wp"
    minimal_size: int = 3
    random_length: int = 3
    bound: int | None = None
    seeds: list = field(default_factory=lambda: [0])
    input_order: list | None = None
    output: str = "-"
    verbosity: int = 0
    max_steps: int | None = None

    def wp_params(self):
        return WpParams(self.minimal_size, self.random_length, self.bound)

    def to_text(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "refs":
                v = ",".join(v)
            elif f.name == "seeds":
                v = format_seeds(v)
            elif f.name == "input_order":
                v = "" if v is None else ",".join(v)
            elif v is None:
                v = ""
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        cfg = cls()
        for n, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg.set(key, value, where=f"config line {n}")
        return cfg

    def set(self, key, value, where="option"):
        names = {f.name for f in fields(self)}
        if key not in names:
            raise UsageError(f"{where}: unknown key {key!r}")
        try:
            if key == "refs":
                value = _split(value)
            elif key == "seeds":
                value = parse_seeds(value)
            elif key == "input_order":
                value = _split(value) or None
            elif key in ("bound", "max_steps"):
                value = int(value) if value not in ("", None) else None
            elif key in ("minimal_size", "random_length", "verbosity"):
                value = int(value)
        except ValueError as e:
            raise UsageError(f"{where}: bad value for {key}: {e}") from None
        setattr(self, key, value)

    def validate(self):
        if self.algorithm not in ABLATIONS:
            raise UsageError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ABLATIONS)}")
        if self.oracle not in ("wp", "perfect"):
            raise UsageError(f"unknown oracle {self.oracle!r}; choose wp or perfect")
        if not self.sul:
            raise UsageError("no SUL given")


# running

def learn_one(sul, refs, algorithm, oracle, seed, wp_params=None, input_order=None,
              max_steps=None, names=("", "")):
    """One learning run; returns (csv row dict, learner)."""
    teacher = Teacher(sul, make_oracle(oracle, seed, wp_params, input_order), RunMetrics())
    learner = AdaptiveLSharp(teacher, refs, algorithm, input_order, max_steps)
    _, m = learner.run()
    return metrics_row(names[0], names[1], algorithm, seed, m), learner


def metrics_row(sul, refs, algorithm, seed, m):
    row = {
        "sul": sul, "refs": refs, "algorithm": algorithm, "seed": seed,
        "oq_count": m.oq_count, "eq_count": m.eq_count,
        "input_symbols_oq": m.input_symbols_oq, "input_symbols_eq": m.input_symbols_eq,
        "total_inputs": m.total_inputs, "learned_states": m.learned_states,
    }
    for r in RULES:
        row[r] = m.rule_applications.get(r, 0)
    return row


def _job(args):
    sul, refs, algorithm, oracle, seed, wp, order, max_steps, names = args
    row, _ = learn_one(sul, refs, algorithm, oracle, seed, wp, order, max_steps, names)
    return row


def run_jobs(jobs, n_workers=1):
    """Rows in job order, whatever order they complete in."""
    if n_workers <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_job, jobs))


def rows_to_csv(rows, columns=CSV_COLUMNS):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def _load(path):
    try:
        return read_dot(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except DotError as e:
        raise UsageError(f"{path}: {e}") from None


def _check_sul(m, path):
    if not m.is_complete():
        raise UsageError(f"{path}: the SUL must be a complete machine")


def _tree_path(template, seed, many):
    if "{seed}" in template:
        return template.replace("{seed}", str(seed))
    if many:
        raise UsageError("--dump-tree needs a {seed} placeholder when several seeds run")
    return template


# commands

def cmd_learn(cfg, jobs=1, dump_tree=None):
    cfg.validate()
    sul = _load(cfg.sul)
    _check_sul(sul, cfg.sul)
    refs = [_load(p) for p in cfg.refs]
    names = (cfg.sul, ";".join(cfg.refs))
    wp = cfg.wp_params()
    if dump_tree:
        rows = []
        for seed in cfg.seeds:
            row, learner = learn_one(sul, refs, cfg.algorithm, cfg.oracle, seed, wp,
                                     cfg.input_order, cfg.max_steps, names)
            rows.append(row)
            with open(_tree_path(dump_tree, seed, len(cfg.seeds) > 1), "w") as f:
                f.write(tree_to_dot(learner.tree))
    else:
        rows = run_jobs([(sul, refs, cfg.algorithm, cfg.oracle, s, wp, cfg.input_order,
                          cfg.max_steps, names) for s in cfg.seeds], jobs)
    _emit(rows_to_csv(rows), cfg.output)
    return EXIT_OK


def cmd_mutate(model, op, seed, attach_index, output):
    m = _load(model)
    if op not in OPERATORS:
        raise UsageError(f"unknown mutation {op!r}; choose from {', '.join(OPERATORS)}")
    _emit(write_dot(mutate(m, MutationSpec(op, seed, attach_index))), output)
    return EXIT_OK


def pivot_rows(rows, mutations, algorithms):
    """Summed total_inputs per mutation (rows) and algorithm (columns)."""
    sums = {(m, a): 0 for m in mutations for a in algorithms}
    for r in rows:
        sums[(r["mutation"], r["algorithm"])] += r["total_inputs"]
    return [{"mutation": m, **{a: sums[(m, a)] for a in algorithms}} for m in mutations]


def cmd_bench(models, mutations, algorithms, cfg, jobs=1, pivot=None, plot_data=None):
    for a in algorithms:
        if a not in ABLATIONS:
            raise UsageError(f"unknown algorithm {a!r}")
    for op in mutations:
        if op not in OPERATORS:
            raise UsageError(f"unknown mutation {op!r}")
    wp = cfg.wp_params()
    tasks, meta = [], []
    for path in models:
        base = _load(path)
        _check_sul(base, path)
        for op in mutations:
            for seed in cfg.seeds:
                sul = mutate(base, MutationSpec(op, seed))
                for a in algorithms:
                    tasks.append((sul, [base], a, cfg.oracle, seed, wp, cfg.input_order,
                                  cfg.max_steps, (f"{path}+{op}", path)))
                    meta.append(op)
    rows = run_jobs(tasks, jobs)
    _emit(rows_to_csv(rows), cfg.output)
    tagged = [{**r, "mutation": op} for r, op in zip(rows, meta)]
    if pivot:
        _emit(rows_to_csv(pivot_rows(tagged, mutations, algorithms), ["mutation"] + list(algorithms)), pivot)
    if plot_data:
        long = [{"mutation": r["mutation"], "algorithm": r["algorithm"], "seed": r["seed"],
                 "metric": "total_inputs", "value": r["total_inputs"]} for r in tagged]
        _emit(rows_to_csv(long, ["mutation", "algorithm", "seed", "metric", "value"]), plot_data)
    return EXIT_OK


def summarize(values):
    """Mean and 5th/95th percentiles (linear interpolation)."""
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(np.percentile(a, 5)), float(np.percentile(a, 95))


def cmd_compare(ref_sets, cfg, jobs=1, raw=None, plot_data=None):
    cfg.validate()
    sul = _load(cfg.sul)
    _check_sul(sul, cfg.sul)
    wp = cfg.wp_params()
    tasks = []
    for paths in ref_sets:
        refs = [_load(p) for p in paths]
        for seed in cfg.seeds:
            tasks.append((sul, refs, cfg.algorithm, cfg.oracle, seed, wp, cfg.input_order,
                          cfg.max_steps, (cfg.sul, ";".join(paths))))
    rows = run_jobs(tasks, jobs)
    summary = []
    for paths in ref_sets:
        name = ";".join(paths)
        mean, p5, p95 = summarize([r["total_inputs"] for r in rows if r["refs"] == name])
        summary.append({"refs": name, "runs": len(cfg.seeds), "mean_total_inputs": repr(mean),
                        "p5_total_inputs": repr(p5), "p95_total_inputs": repr(p95)})
    _emit(rows_to_csv(summary, ["refs", "runs", "mean_total_inputs", "p5_total_inputs",
                                "p95_total_inputs"]), cfg.output)
    if raw:
        _emit(rows_to_csv(rows), raw)
    if plot_data:
        long = [{"refs": r["refs"], "seed": r["seed"], "metric": "total_inputs",
                 "value": r["total_inputs"]} for r in rows]
        _emit(rows_to_csv(long, ["refs", "seed", "metric", "value"]), plot_data)
    return EXIT_OK


# argument parsing

def _common(p, with_sul=True):
    p.add_argument("--config", help="key=value file; flags override it")
    if with_sul:
        p.add_argument("--sul", help="DOT file of the system under learning")
    p.add_argument("--algorithm", "-a", help="ablation: " + ", ".join(ABLATIONS))
    p.add_argument("--oracle", choices=["wp", "perfect"])
    p.add_argument("--seeds", help="count N (seeds 0..N-1) or comma list")
    p.add_argument("--input-order", help="comma-separated input order")
    p.add_argument("--wp-minimal-size", type=int)
    p.add_argument("--wp-random-length", type=int)
    p.add_argument("--wp-bound", type=int, help="max tests per equivalence query")
    p.add_argument("--max-steps", type=int, help="cap on rule applications per run")
    p.add_argument("--output", "-o", help="CSV destination (default stdout)")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("-v", "--verbose", action="count", default=0, help="log rule events to stderr")


def build_parser():
    parser = argparse.ArgumentParser(prog="alsharp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a SUL, one CSV row per seed")
    _common(p)
    p.add_argument("--ref", action="append", default=None, help="reference DOT file (repeatable)")
    p.add_argument("--dump-tree", help="write the final observation tree as DOT ({seed} placeholder)")
    p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")

    p = sub.add_parser("mutate", help="apply one mutation operator to a DOT model")
    p.add_argument("model")
    p.add_argument("--op", required=True, help="mut1 .. mut14")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attach-index", type=int)
    p.add_argument("--output", "-o", default="-")

    p = sub.add_parser("bench", help="mutation matrix: raw CSV plus summed pivot")
    _common(p, with_sul=False)
    p.add_argument("--model", action="append", required=True, help="base model DOT (repeatable)")
    p.add_argument("--mutations", default="mut5,mut6,mut12")
    p.add_argument("--algorithms", default="lsharp,full")
    p.add_argument("--pivot", help="summed pivot CSV destination")
    p.add_argument("--emit-plot-data", help="tidy long-format CSV destination")

    p = sub.add_parser("compare", help="one SUL under several reference sets")
    _common(p)
    p.add_argument("--ref-set", action="append", required=True,
                   help="comma-separated reference DOT files; empty string for none")
    p.add_argument("--raw", help="per-run CSV destination")
    p.add_argument("--emit-plot-data", help="tidy long-format CSV destination")
    return parser


def config_from_args(args):
    if getattr(args, "config", None):
        try:
            with open(args.config) as f:
                cfg = RunConfig.from_text(f.read())
        except OSError as e:
            raise UsageError(f"cannot read {args.config}: {e.strerror}") from None
    else:
        cfg = RunConfig()
    flags = {
        "sul": getattr(args, "sul", None), "algorithm": args.algorithm, "oracle": args.oracle,
        "seeds": args.seeds, "input_order": args.input_order,
        "minimal_size": args.wp_minimal_size, "random_length": args.wp_random_length,
        "bound": args.wp_bound, "max_steps": args.max_steps, "output": args.output,
    }
    for key, value in flags.items():
        if value is not None:
            cfg.set(key, str(value), where=f"--{key}")
    if getattr(args, "ref", None) is not None:
        cfg.refs = list(args.ref)
    if args.verbose:
        cfg.verbosity = args.verbose
    return cfg


def _log_events_to_stderr():
    """Send the rule event log to stderr; returns an undo callback."""
    log = logging.getLogger("alsharp")
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("%(message)s"))
    old = log.level
    log.addHandler(h)
    log.setLevel(logging.DEBUG)

    def undo():
        log.removeHandler(h)
        log.setLevel(old)
    return undo


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    undo = None
    try:
        if args.command == "mutate":
            return cmd_mutate(args.model, args.op, args.seed, args.attach_index, args.output)
        cfg = config_from_args(args)
        if cfg.verbosity:
            undo = _log_events_to_stderr()
        if args.command == "learn":
            if args.print_config:
                sys.stdout.write(cfg.to_text())
                return EXIT_OK
            return cmd_learn(cfg, args.jobs, args.dump_tree)
        if args.command == "bench":
            return cmd_bench(args.model, _split(args.mutations), _split(args.algorithms),
                             cfg, args.jobs, args.pivot, args.emit_plot_data)
        ref_sets = [_split(s) for s in args.ref_set]
        return cmd_compare(ref_sets, cfg, args.jobs, args.raw, args.emit_plot_data)
    except (UsageError, MutationError, MealyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StepLimitExceeded as e:
        print(f"learning did not converge: {e}", file=sys.stderr)
        return EXIT_LEARNING
    except (PreconditionError, NondeterminismError, AdequacyError, AssertionError) as e:
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if undo is not None:
            undo()


if __name__ == "__main__":
    sys.exit(main())
