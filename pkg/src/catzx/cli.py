import argparse
import csv
import logging
import sys
from typing import IO, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from .circuit import Circuit, circuit_to_diagram, gen_hidden_shift, gen_random_cliffordt, parse_qasm
from .config import Settings, get_settings, load_config
from .decompose import StrategyKind
from .driver import SimResult, amplitude

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

CSV_COLUMNS = [
    "id", "qubits", "t_count", "strategy", "seed", "wall_ms", "leaf_terms", "effective_alpha", "amp_re", "amp_im",
]


class BenchRecord(BaseModel):
    id: str
    qubits: int
    t_count: int
    strategy: str
    seed: int
    wall_ms: float
    leaf_terms: int
    effective_alpha: Optional[float]
    amp_re: float
    amp_im: float

    def to_row(self) -> List[str]:
        alpha = "" if self.effective_alpha is None else f"{self.effective_alpha:.6f}"
        return [
            self.id, str(self.qubits), str(self.t_count), self.strategy, str(self.seed),
            f"{self.wall_ms:.3f}", str(self.leaf_terms), alpha, repr(self.amp_re), repr(self.amp_im),
        ]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> "BenchRecord":
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"Expected {len(CSV_COLUMNS)} columns, got {len(row)}")
        fields = dict(zip(CSV_COLUMNS, row))
        if fields["effective_alpha"] == "":
            fields["effective_alpha"] = None
        return cls.model_validate(fields)


def _simulate_circuit(
    circuit: Circuit, input_spec: str, output_spec: str, settings: Settings, trace: bool = False
) -> SimResult:
    d = circuit_to_diagram(circuit, input_spec, output_spec)
    result = amplitude(
        d,
        StrategyKind(settings.strategy),
        workers=settings.workers,
        split_depth=settings.split_depth,
        gadget_fusion=settings.gadget_fusion,
        trace=trace,
    )
    result.seed = settings.seed
    return result


def cmd_simulate(args: argparse.Namespace, settings: Settings, out: IO[str]) -> int:
    with open(args.qasm) as f:
        circuit = parse_qasm(f.read())
    logger.info(f"🚀 Simulating {args.qasm}: {circuit.qubits} qubits, T-count {circuit.t_count()}, strategy {settings.strategy}")
    if args.dump_diagram:
        out.write(circuit_to_diagram(circuit, args.input_spec, args.output_spec).to_text())
    result = _simulate_circuit(circuit, args.input_spec, args.output_spec, settings, trace=args.trace)
    value = result.amplitude_complex()
    stats = result.stats
    out.write(f"amplitude: {result.amplitude}\n")
    out.write(f"amplitude_float: {value.real:.12g} {value.imag:.12g}\n")
    out.write(f"t_count: {stats.initial_t}\n")
    out.write(f"leaf_terms: {stats.leaf_terms}\n")
    out.write(f"pruned: {stats.pruned}\n")
    out.write(f"max_depth: {stats.max_depth}\n")
    alpha = "n/a" if stats.effective_alpha is None else f"{stats.effective_alpha:.6f}"
    out.write(f"effective_alpha: {alpha}\n")
    kinds = " ".join(f"{k}={n}" for k, n in sorted(stats.decompositions_by_kind.items()))
    out.write(f"decompositions: {kinds or 'none'}\n")
    out.write(f"wall_ms: {stats.wall_time * 1000:.3f}\n")
    logger.info(f"✅ Done in {stats.wall_time * 1000:.1f} ms with {stats.leaf_terms} leaves")
    return EXIT_OK


def _bench_record(run_id: str, circuit: Circuit, input_spec: str, output_spec: str, settings: Settings, seed: int) -> BenchRecord:
    result = _simulate_circuit(circuit, input_spec, output_spec, settings)
    value = result.amplitude_complex()
    return BenchRecord(
        id=run_id,
        qubits=circuit.qubits,
        t_count=circuit.t_count(),
        strategy=settings.strategy,
        seed=seed,
        wall_ms=result.stats.wall_time * 1000,
        leaf_terms=result.stats.leaf_terms,
        effective_alpha=result.stats.effective_alpha,
        amp_re=value.real,
        amp_im=value.imag,
    )


def bench_records(args: argparse.Namespace, settings: Settings):
    """Yield one BenchRecord per generated instance."""
    if args.family == "cliffordt":
        if args.tmax < 1 or args.step < 1 or args.reps < 0:
            raise ValueError("bench cliffordt needs --tmax >= 1, --step >= 1 and --reps >= 0")
        zeros = "0" * args.qubits
        run = 0
        for t in range(1, args.tmax + 1, args.step):
            for rep in range(args.reps):
                seed = settings.seed + run
                run += 1
                circuit = gen_random_cliffordt(args.qubits, t, seed)
                yield _bench_record(f"cliffordt-q{args.qubits}-t{t}-r{rep}", circuit, zeros, zeros, settings, seed)
    else:
        if args.count < 0:
            raise ValueError("bench hiddenshift needs --count >= 0")
        zeros = "0" * args.qubits
        for i in range(args.count):
            seed = settings.seed + i
            circuit, shift = gen_hidden_shift(args.qubits, args.ccz, seed)
            yield _bench_record(f"hiddenshift-q{args.qubits}-c{args.ccz}-{i}", circuit, zeros, shift, settings, seed)


def summarize(records: Sequence[BenchRecord]) -> str:
    if not records:
        return "📊 records=0"
    logs = np.log10([max(r.wall_ms, 1e-3) for r in records])
    median_leaves = float(np.median([r.leaf_terms for r in records]))
    return (
        f"📊 records={len(records)} mean_log10_ms={np.mean(logs):.4f} "
        f"var_log10_ms={np.var(logs):.4f} median_leaf_terms={median_leaves:g}"
    )


def cmd_bench(args: argparse.Namespace, settings: Settings, out: IO[str]) -> int:
    logger.info(f"🚀 Benchmark {args.family} on {args.qubits} qubits, strategy {settings.strategy}")
    sink = open(args.output, "w", newline="") if args.output else out
    records: List[BenchRecord] = []
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in bench_records(args, settings):
            writer.writerow(record.to_row())
            sink.flush()
            records.append(record)
            logger.debug(f"{record.id}: {record.wall_ms:.1f} ms, {record.leaf_terms} leaves")
    finally:
        if sink is not out:
            sink.close()
    print(summarize(records), file=sys.stderr)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", choices=[s.value for s in StrategyKind], help="Decomposition strategy")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument("--seed", type=int, help="Seed (generators and CSV records)")
    parser.add_argument("--gadget-fusion", action="store_true", default=None, help="Fuse phase gadgets with identical legs")
    parser.add_argument("--env", type=str, help="Path to env file")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log every rewrite step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catzx",
        description="Exact Clifford+T amplitudes by ZX simplification and cat-state decompositions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  catzx simulate --qasm circuit.qasm --in 000 --out 000
  catzx simulate --qasm circuit.qasm --in +++ --out 0-1 --strategy bss --workers 4 --trace
  catzx bench cliffordt --qubits 20 --tmax 43 --step 3 --reps 10 --output cliffordt.csv
  catzx bench hiddenshift --qubits 20 --ccz 16 --count 125 --strategy cats
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Compute one amplitude <out|C|in>")
    sim.add_argument("--qasm", required=True, help="QASM file")
    sim.add_argument("--in", dest="input_spec", required=True, help="Input product state over {0,1,+,-}")
    sim.add_argument("--out", dest="output_spec", required=True, help="Output product effect over {0,1,+,-}")
    sim.add_argument("--dump-diagram", action="store_true", help="Print the translated diagram first")
    sim.add_argument("--trace", action="store_true", help="Log one line per decomposition")
    _add_common(sim)

    bench = sub.add_parser("bench", help="Run a benchmark sweep and write CSV")
    families = bench.add_subparsers(dest="family", required=True)
    cliffordt = families.add_parser("cliffordt", help="Random Pauli-exponential circuits")
    cliffordt.add_argument("--qubits", type=int, default=20)
    cliffordt.add_argument("--tmax", type=int, default=43)
    cliffordt.add_argument("--step", type=int, default=3)
    cliffordt.add_argument("--reps", type=int, default=10)
    hidden = families.add_parser("hiddenshift", help="Hidden-shift circuits")
    hidden.add_argument("--qubits", type=int, default=20)
    hidden.add_argument("--ccz", type=int, default=16)
    hidden.add_argument("--count", type=int, default=125)
    for p in (cliffordt, hidden):
        p.add_argument("--output", "-o", help="CSV path (default: stdout)")
        _add_common(p)
    return parser


def _settings_from(args: argparse.Namespace) -> Settings:
    base = get_settings()
    overrides = {
        "strategy": args.strategy,
        "workers": args.workers,
        "seed": args.seed,
        "gadget_fusion": args.gadget_fusion,
    }
    return base.model_copy(update={k: v for k, v in overrides.items() if v is not None})


def main(argv: Optional[Sequence[str]] = None) -> None:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    load_config(argv)
    try:
        settings = Settings.model_validate(_settings_from(args).model_dump())
    except ValidationError as e:
        logger.error(f"❌ Invalid configuration: {e}")
        sys.exit(EXIT_USAGE)
    logging.getLogger().setLevel(settings.log_level)
    if args.verbose:
        logging.getLogger("catzx.simplify").setLevel(logging.DEBUG)

    command = cmd_simulate if args.command == "simulate" else cmd_bench
    try:
        code = command(args, settings, sys.stdout)
    except (ValueError, OSError) as e:
        logger.error(f"❌ {e}")
        code = EXIT_USAGE
    except Exception as e:
        logger.error(f"❌ Simulation failed: {e}")
        code = EXIT_RUNTIME
    sys.exit(code)


if __name__ == "__main__":
    main()
