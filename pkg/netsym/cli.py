# ================================================
# File: netsym/cli.py
# ================================================
import argparse
import json
import os
import sys
import traceback
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

from . import analysis
from .catalogue import catalogue_report
from .config import MONOID_ENUMERATION_BOUND, NEWTON_TOL, RESIDUAL_TOL, SERVER_HOST, SERVER_PORT
from .errors import InvalidConfig, NetsymError
from .network.monoid import NetworkSpec
from .utils.helpers import atomic_write, dump_json, load_network_file, parse_csv_floats, set_verbose

SUBCOMMANDS = (
    "closure", "fundamental", "synchrony", "decompose", "classify", "simulate",
    "continue", "verify", "enumerate-monoids", "catalogue", "serve",
)
CSV_DEFAULT = ("simulate", "continue")


@dataclass
class RunConfig:
    subcommand: str
    network: Optional[str] = None
    function: Optional[str] = None
    seed: Optional[int] = None
    dim: int = 1
    newton_tol: float = NEWTON_TOL
    residual_tol: float = RESIDUAL_TOL
    out: Optional[str] = None
    format: str = "json"
    constants: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InvalidConfig(f"Unknown subcommand '{self.subcommand}'.")
        if self.dim < 1:
            raise InvalidConfig(f"--dim must be at least 1, got {self.dim}.")
        for name, flag in (("newton_tol", "--tol-newton"), ("residual_tol", "--tol-residual")):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{flag} must be positive, got {getattr(self, name)}.")
        if self.format not in ("json", "csv"):
            raise InvalidConfig(f"Unknown format '{self.format}'.")
        if self.format == "csv" and self.subcommand not in CSV_DEFAULT:
            raise InvalidConfig(f"'{self.subcommand}' has no CSV output.")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fmt = args.format or ("csv" if args.command in CSV_DEFAULT else "json")
        return cls(
            subcommand=args.command,
            network=getattr(args, "network", None),
            function=_read_function(args),
            seed=args.seed,
            dim=args.dim,
            newton_tol=args.tol_newton,
            residual_tol=args.tol_residual,
            out=args.out,
            format=fmt,
            constants=list(args.const or []),
        )

    def spec(self) -> NetworkSpec:
        """Network file path, or a worked-example name when no such file exists."""
        if self.network is None:
            raise InvalidConfig("A network is required.")
        if os.path.isfile(self.network) or not _looks_like_name(self.network):
            return analysis.network_from_payload(load_network_file(self.network))
        return analysis.network_by_name(self.network)


def _looks_like_name(ref: str) -> bool:
    return ref == "running" or ref.startswith(("two_cell/", "three_cell/"))

def _read_function(args: argparse.Namespace) -> Optional[str]:
    expr = getattr(args, "expr", None)
    path = getattr(args, "function_file", None)
    if expr is not None and path is not None:
        raise InvalidConfig("Give either -f FILE or --expr TEXT, not both.")
    if path is None:
        return expr
    if not os.path.isfile(path):
        raise InvalidConfig(f"Response function file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


# --- Argument parsing ---

class CliParser(argparse.ArgumentParser):
    """Usage errors become InvalidConfig, so they reach stderr as JSON."""

    def error(self, message: str):
        raise InvalidConfig(f"{self.prog}: {message}", {"usage": self.format_usage().strip()})


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="random seed (default: $NETSYM_SEED or 0x5EED)")
    parser.add_argument("--dim", type=int, default=1, help="cell phase-space dimension d")
    parser.add_argument("--tol-newton", type=float, default=NEWTON_TOL)
    parser.add_argument("--tol-residual", type=float, default=RESIDUAL_TOL)
    parser.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--const", action="append", metavar="NAME=VALUE", help="bind a constant (repeatable)")
    parser.add_argument("--verbose", action="store_true", help="informational logging on stderr")

def _network_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("network", help="network JSON file, or a worked example (running, three_cell/sigma4, ...)")

def _function_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("-f", dest="function_file", metavar="FILE", help="response function file")
    group.add_argument("--expr", help="response function given inline")

def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="netsym", description="Monoid network dynamics: structure, synchrony and bifurcations.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("closure", "semigroup closure and composition table"),
                       ("fundamental", "fundamental network and conjugation maps"),
                       ("decompose", "indecomposable decomposition of the fundamental representation")):
        p = sub.add_parser(name, help=text)
        _network_arg(p)
        _common(p)

    p = sub.add_parser("synchrony", help="balanced partitions")
    _network_arg(p)
    p.add_argument("--fundamental", action="store_true", help="analyze the fundamental network")
    _common(p)

    p = sub.add_parser("classify", help="codimension-one steady-state bifurcations per summand")
    _network_arg(p)
    p.add_argument("--summand", type=int, default=None, help="report only this summand (1-indexed)")
    p.add_argument("--no-lift", action="store_true", help="skip lifting branches to the original network")
    _function_args(p, required=False)
    p.add_argument("--x0", default=None, help="fundamental equilibrium for instance classification (csv)")
    p.add_argument("--lambda0", type=float, default=0.0)
    _common(p)

    for name, text in (("simulate", "integrate the network ODE"),
                       ("verify", "semiconjugacy and equilibrium correspondence checks")):
        p = sub.add_parser(name, help=text)
        _network_arg(p)
        _function_args(p)
        p.add_argument("--x0", required=True, help="initial state (csv)")
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
        p.add_argument("--t", dest="t_end", type=float, default=5.0)
        p.add_argument("--dt", type=float, default=1e-3)
        if name == "simulate":
            p.add_argument("--fundamental", action="store_true", help="integrate the fundamental network")
        _common(p)

    p = sub.add_parser("continue", help="branches of equilibria through a bifurcation point")
    _network_arg(p)
    _function_args(p)
    p.add_argument("--x0", default=None, help="fundamental equilibrium (csv, default 0)")
    p.add_argument("--lambda0", type=float, default=0.0)
    p.add_argument("--range", nargs=2, type=float, required=True, metavar=("A", "B"))
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--subspace", default=None, help="JSON list of basis vectors to restrict to")
    _common(p)

    for name, text in (("enumerate-monoids", "monoids of order n up to isomorphism"),
                       ("catalogue", "full pipeline for every monoid of order n")):
        p = sub.add_parser(name, help=text)
        p.add_argument("n", type=int)
        p.add_argument("--bound", type=int, default=MONOID_ENUMERATION_BOUND)
        _common(p)

    p = sub.add_parser("serve", help="HTTP service with a background job queue")
    p.add_argument("--host", default=SERVER_HOST)
    p.add_argument("--port", type=int, default=SERVER_PORT)
    _common(p)
    return parser


# --- Subcommands ---

def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        atomic_write(cfg.out, text)
    else:
        sys.stdout.write(text)

def _function(cfg: RunConfig, spec: NetworkSpec):
    return analysis.function_from_text(cfg.function, spec, cfg.dim, cfg.constants)

def _vector(text: Optional[str], size: int, what: str) -> List[float]:
    if text is None:
        return [0.0] * size
    return parse_csv_floats(text, size, what)

def cmd_closure(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return analysis.closure_report(cfg.spec())

def cmd_fundamental(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return analysis.fundamental_report(cfg.spec())

def cmd_synchrony(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return analysis.synchrony_report(cfg.spec(), args.fundamental, cfg.dim)

def cmd_decompose(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return analysis.decompose_report(cfg.spec(), cfg.dim, cfg.seed)

def cmd_classify(cfg: RunConfig, args: argparse.Namespace) -> Any:
    spec = cfg.spec()
    if cfg.function is None:
        if args.x0 is not None:
            raise InvalidConfig("--x0 needs a response function (-f or --expr).")
        return analysis.classify_report(spec, cfg.dim, cfg.seed, args.summand, lift=not args.no_lift)
    size = analysis.monoid_size(spec) * cfg.dim
    x0 = _vector(args.x0, size, "--x0")
    return analysis.instance_report(spec, _function(cfg, spec), x0, args.lambda0, cfg.seed)

def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> Any:
    spec = cfg.spec()
    cells = analysis.monoid_size(spec) if args.fundamental else spec.num_cells
    x0 = _vector(args.x0, cells * cfg.dim, "--x0")
    trajectory = analysis.simulate(spec, _function(cfg, spec), x0, args.lam, args.t_end, args.dt, args.fundamental)
    if cfg.format == "csv":
        return trajectory.to_csv("X" if args.fundamental else "x")
    return trajectory.to_dict()

def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> Any:
    spec = cfg.spec()
    x0 = _vector(args.x0, spec.num_cells * cfg.dim, "--x0")
    return analysis.verify_report(spec, _function(cfg, spec), x0, args.lam, args.t_end, args.dt, cfg.residual_tol)

def cmd_continue(cfg: RunConfig, args: argparse.Namespace) -> Any:
    spec = cfg.spec()
    size = analysis.monoid_size(spec) * cfg.dim
    subspace = None
    if args.subspace is not None:
        try:
            subspace = analysis.parse_subspace(json.loads(args.subspace), size)
        except json.JSONDecodeError as e:
            raise InvalidConfig(f"--subspace is not valid JSON: {e}")
    runs, summary = analysis.continue_report(
        spec, _function(cfg, spec), _vector(args.x0, size, "--x0"), args.lambda0, tuple(args.range),
        args.step, subspace=subspace, seed=cfg.seed, tol=cfg.newton_tol,
    )
    if cfg.format == "json":
        return summary
    # CSV is the artifact; the summary goes beside it, or to stderr without --out
    if cfg.out:
        atomic_write(cfg.out + ".summary.json", dump_json(summary))
    else:
        sys.stderr.write(dump_json(summary))
    return analysis.runs_csv(runs)

def cmd_enumerate(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return analysis.enumerate_report(args.n, args.bound)

def cmd_catalogue(cfg: RunConfig, args: argparse.Namespace) -> Any:
    return catalogue_report(args.n, cfg.dim, cfg.seed, args.bound)

def cmd_serve(cfg: RunConfig, args: argparse.Namespace) -> Any:
    from .server.app import run

    run(args.host, args.port)
    return None

COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], Any]] = {
    "closure": cmd_closure,
    "fundamental": cmd_fundamental,
    "synchrony": cmd_synchrony,
    "decompose": cmd_decompose,
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "continue": cmd_continue,
    "verify": cmd_verify,
    "enumerate-monoids": cmd_enumerate,
    "catalogue": cmd_catalogue,
    "serve": cmd_serve,
}


def _diagnostic(payload: Dict[str, Any]) -> None:
    sys.stderr.write(dump_json(payload))

def main(argv: Optional[Sequence[str]] = None) -> int:
    verbose = False
    try:
        args = build_parser().parse_args(argv)
        verbose = args.verbose
        set_verbose(verbose)
        cfg = RunConfig.from_args(args)
        result = COMMANDS[cfg.subcommand](cfg, args)
        if result is not None:
            _emit(cfg, result if isinstance(result, str) else dump_json(result))
        return 0
    except NetsymError as e:
        _diagnostic({"error": e.message, "code": e.code, "details": e.details})
        return e.exit_code
    except KeyboardInterrupt:
        return 130
    except Exception as e:
        if verbose:
            traceback.print_exc()
        _diagnostic({"error": str(e), "code": "internal", "details": type(e).__name__})
        return 1


if __name__ == "__main__":
    sys.exit(main())
