"""Command-line interface.

Subcommands:

* ``sweep --config FILE``    run a configured parameter sweep
* ``figure ID --out DIR``    reproduce a bundled figure preset
* ``compare --config FILE``  run both engines and report discrepancies
* ``coeffs ...``             dump evolution coefficients as JSON

Exit codes: 0 on success, 2 for configuration errors, 3 for
numerical-contract failures (quadrature, truncation, step size,
non-physical states).
"""

from __future__ import annotations

import argparse
import json
import sys

from .coefficients import (RESONANCE_GUARD, coeffs_constant, coeffs_modulated,
                           coeffs_numeric, coeffs_resonant)
from .coupling import CouplingProfile
from .errors import (ConfigError, DomainError, InvalidParameter,
                     InvariantViolation, NonPhysicalState, QuadratureFailure,
                     ResonanceSingularity, StepSizeTooLarge,
                     TruncationTooSmall, UnknownPreset)
from .sweep import compare_engines, load_config, reproduce_figure, run_sweep
from ._version import __version__

_CONFIG_ERRORS = (ConfigError, UnknownPreset, InvalidParameter)
_NUMERICAL_ERRORS = (QuadratureFailure, TruncationTooSmall, StepSizeTooLarge,
                     NonPhysicalState, InvariantViolation, ResonanceSingularity,
                     DomainError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nongauss",
        description="Two-engine simulator of the entropic non-Gaussianity "
                    "generated by nonlinear optomechanical dynamics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a configured parameter sweep")
    p_sweep.add_argument("--config", required=True, help="path to a JSON run config")

    p_fig = sub.add_parser("figure", help="reproduce a bundled figure preset")
    p_fig.add_argument("id", help="preset id, e.g. fig2a, fig6b, fig8a")
    p_fig.add_argument("--out", required=True, help="output directory")

    p_cmp = sub.add_parser("compare", help="cross-check the two engines")
    p_cmp.add_argument("--config", required=True, help="path to a JSON run config")

    p_coef = sub.add_parser("coeffs", help="dump evolution coefficients as JSON")
    p_coef.add_argument("--g0", type=float, required=True)
    p_coef.add_argument("--tau", type=float, required=True)
    p_coef.add_argument("--epsilon", type=float, default=0.0)
    p_coef.add_argument("--omega0", type=float, default=0.0)
    p_coef.add_argument("--numeric", action="store_true",
                        help="force the quadrature evaluator")
    return parser


def _coeffs_command(args) -> dict:
    if args.numeric:
        if args.epsilon or args.omega0:
            profile = CouplingProfile.modulated(args.g0, args.epsilon, args.omega0)
        else:
            profile = CouplingProfile.constant(args.g0)
        c = coeffs_numeric(profile, args.tau)
        route = "numeric"
    elif args.epsilon == 0.0 or args.omega0 == 0.0:
        c = coeffs_constant(args.g0, args.tau)
        route = "constant"
    elif abs(args.omega0 - 1.0) <= RESONANCE_GUARD:
        c = coeffs_resonant(args.g0, args.epsilon, args.tau)
        route = "resonant"
    else:
        c = coeffs_modulated(args.g0, args.epsilon, args.omega0, args.tau)
        route = "modulated"
    return {
        "route": route,
        "tau": c.tau,
        "f_na2": c.f_na2,
        "f_b_plus": c.f_b_plus,
        "f_b_minus": c.f_b_minus,
        "theta_a": c.theta_a,
        "f_complex": [c.f_complex.real, c.f_complex.imag],
    }


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return int(exc.code or 0)

    try:
        if args.command == "sweep":
            data, meta, rows = run_sweep(load_config(args.config))
            print(f"wrote {len(rows)} rows to {data} (sidecar {meta})")
        elif args.command == "figure":
            data, meta, rows = reproduce_figure(args.id, args.out)
            print(f"wrote {len(rows)} rows to {data} (sidecar {meta})")
        elif args.command == "compare":
            path, report = compare_engines(load_config(args.config))
            verdict = report["passed"]
            print(f"wrote report to {path}: max |delta_a - delta_f| = "
                  f"{report['max_abs_diff']} (tolerance {report['tolerance']}, "
                  f"passed = {verdict})")
            if verdict is False:
                return 3
        else:  # coeffs
            print(json.dumps(_coeffs_command(args), indent=1))
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
