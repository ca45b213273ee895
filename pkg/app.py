from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional

from commands import (
    EXIT_FAULT,
    EXIT_VIOLATION,
    CommandResult,
    load_config,
    run_classify,
    run_hypotheses,
    run_solve,
    run_verify,
)
from core.config import NumericsConfig, ensure_env
from core.errors import ConfigError, HessianError, HypothesisViolation
from core.logging import configure_logging, get_logger

logger = get_logger("app")

COMMANDS = ("solve", "classify", "verify", "hypotheses")


# ---------------------------
# utilitário de console
# ---------------------------
class Console:
    @staticmethod
    def info(msg: str) -> None:
        print(msg)

    @staticmethod
    def error(msg: str) -> None:
        print(f"[erro] {msg}", file=sys.stderr)


# ---------------------------
# argumentos
# ---------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hessian",
        description="Soluções radiais de sistemas (k1,k2)-Hessianos: resolver, classificar e verificar.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("config", help="arquivo .cfg com [problem], [witness] e [numerics]")
        cmd.add_argument("--rmax", type=float)
        cmd.add_argument("--grid-n", type=int)
        cmd.add_argument("--out-dir")
        cmd.add_argument("--log-level")
        if name == "solve":
            cmd.add_argument("--tol", type=float)
            cmd.add_argument("--max-iter", type=int)
            cmd.add_argument("--refine-cap", type=int)
            cmd.add_argument("--extrapolate", action="store_true", help="Richardson entre as duas últimas resoluções")
        if name == "classify":
            cmd.add_argument("--tol", type=float)
            cmd.add_argument("--max-iter", type=int)
            cmd.add_argument("--refine-cap", type=int)
            cmd.add_argument("--limit-budget", type=float)
        if name == "verify":
            cmd.add_argument("--u1", required=True, help="expressão em t para u1")
            cmd.add_argument("--u2", required=True, help="expressão em t para u2")
            cmd.add_argument("--fd", action="store_true", help="derivadas por diferenças finitas")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("rmax", "grid_n", "tol", "max_iter", "refine_cap", "out_dir", "limit_budget", "log_level")
    return {k: getattr(args, k, None) for k in keys}


# ---------------------------
# despacho
# ---------------------------
def dispatch(args: argparse.Namespace) -> CommandResult:
    cfg = load_config(args.config)
    # precedência: ambiente < [numerics] do arquivo < flags
    numerics = NumericsConfig().merged(**cfg.numerics).merged(**_overrides(args))
    logger.debug("numerics: %s", numerics)

    if args.command == "solve":
        return run_solve(cfg, numerics, extrapolate=args.extrapolate)
    if args.command == "classify":
        return run_classify(cfg, numerics)
    if args.command == "verify":
        return run_verify(cfg, numerics, args.u1, args.u2, finite_differences=args.fd)
    return run_hypotheses(cfg, numerics)


# ---------------------------
# entrypoint
# ---------------------------
def main(argv: Optional[List[str]] = None) -> int:
    ensure_env()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or NumericsConfig().log_level)

    try:
        result = dispatch(args)
    except ConfigError as e:
        Console.error(f"configuração inválida: {e}")
        return EXIT_FAULT
    except HypothesisViolation as e:
        Console.error(f"hipótese violada {e}")
        return EXIT_VIOLATION
    except HessianError as e:
        Console.error(str(e))
        return EXIT_FAULT
    except KeyboardInterrupt:
        Console.info("\nEncerrando...")
        return EXIT_FAULT
    except Exception as e:
        logger.exception("erro inesperado")
        Console.error(f"Ocorreu um erro inesperado: {e}")
        return EXIT_FAULT

    Console.info(result.text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
