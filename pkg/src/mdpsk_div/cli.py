"""
Command-line front end.

    mdpsk-div rho       [--kappa K] [--fd-T F ...] [--config PATH]
    mdpsk-div analyze   [--config PATH] [--out PATH]
    mdpsk-div simulate  [--config PATH] [--out PATH] [--seed S] [--trials N] [--receiver 17,20]
    mdpsk-div validate  [same as simulate]

Exit status: 0 on success, 2 on a configuration error, 3 on a numerical error.
"""

import argparse
import cmath
import csv
import dataclasses
import datetime
import io
import logging
import math
import sys

from . import __version__
from .analysis import (bep_average, bep_j3_exact, bep_j3_oracle, oracle_inputs, spectral_params)
from .config import DEFAULT_CONFIG, RunManifest, manifest_header, parse_config
from .exceptions import ConfigError, NumericalError
from .fading import DopplerModel, branch_statistics
from .montecarlo import estimate, resolve_branches, run_point_many
from .receivers import ReceiverKind

log = logging.getLogger("mdpsk_div")


def _load(args):
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        text = DEFAULT_CONFIG
    config, receivers = parse_config(text)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "mode", None) is not None:
        overrides["rho_mode"] = args.mode
    if getattr(args, "receiver", None):
        receivers = args.receiver
        overrides["receiver"] = receivers[0]
    if overrides:
        try:
            config = dataclasses.replace(config, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return config, receivers


def _manifest(args, config, receivers, mode):
    stamp = None
    if getattr(args, "stamp", False):
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return RunManifest(config, tuple(receivers), mode, __version__, args.out, stamp)


def _emit(args, manifest, header, rows):
    buf = io.StringIO()
    for line in manifest_header(manifest):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x):
    return repr(float(x))


def _analytic_row(stats):
    params = spectral_params(stats)
    closed = bep_average(params)
    oracle = bep_j3_oracle(params, oracle_inputs(stats))
    p3x = bep_j3_exact(params)
    return closed, oracle, p3x, (closed.p_j1 + closed.p_j2 + p3x) / 3.0


def _require_8dpsk(config):
    if config.m_ary != 8:
        raise ConfigError("closed-form error probabilities are available for M = 8 only")


def cmd_rho(args):
    kappa = args.kappa
    fds = args.fd_T
    if fds is None:
        config, _ = _load(args)
        models = [b.doppler for b in config.branches if b.doppler is not None]
    else:
        try:
            models = [DopplerModel(3.0 if kappa is None else kappa, f) for f in fds]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    rows = []
    for i, model in enumerate(models, 1):
        for mode in ("direct", "integrated"):
            rho = branch_statistics(model, 1.0, 1.0, mode=mode).rho
            rows.append([i, model.kappa, model.fd_T, mode, f"{rho.real:.6f}", f"{rho.imag:.6f}",
                         f"{abs(rho):.6f}", f"{cmath.phase(rho):.6f}"])
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["branch", "kappa", "fd_T", "mode", "re", "im", "magnitude", "phase_rad"])
    writer.writerows(rows)
    return 0


def cmd_analyze(args):
    config, receivers = _load(args)
    _require_8dpsk(config)
    rows = []
    for gi, snr in enumerate(config.snr_db):
        closed, oracle, p3x, pavg_x = _analytic_row(resolve_branches(config, gi))
        rows.append([_fmt(snr)] + [_fmt(v) for v in closed.as_tuple()]
                    + [_fmt(oracle), _fmt(p3x), _fmt(pavg_x)])
    header = ["snr_per_bit_db", "p_j1", "p_j2", "p_j3", "p_avg", "p_j3_oracle", "p_j3_exact", "p_avg_exact"]
    _emit(args, _manifest(args, config, receivers, "analyze"), header, rows)
    return 0


def _simulate(config, receivers, workers):
    for gi, snr in enumerate(config.snr_db):
        log.info("simulating %.6g dB (%d trials, receivers %s)", snr, config.trials,
                 ",".join(str(int(k)) for k in receivers))
        tallies = run_point_many(config, gi, receivers, workers=workers)
        for kind in receivers:
            yield gi, snr, kind, tallies[kind]


def _sim_columns(nbits):
    names = [f"j{i + 1}" for i in range(nbits)] + ["avg"]
    return [f"p_{n}" for n in names] + [f"se_{n}" for n in names]


def cmd_simulate(args):
    config, receivers = _load(args)
    nbits = int(math.log2(config.m_ary))
    header = ["snr_per_bit_db", "receiver"] + _sim_columns(nbits) + ["symbol_errors", "ties", "trials", "seed"]
    rows = []
    for _, snr, kind, tally in _simulate(config, receivers, args.workers):
        per_bit, avg = estimate(tally)
        est = per_bit + [avg]
        rows.append([_fmt(snr), int(kind)] + [_fmt(e.estimate) for e in est] + [_fmt(e.std_error) for e in est]
                    + [tally.symbol_errors, tally.ties, tally.trials, config.seed])
    _emit(args, _manifest(args, config, receivers, "simulate"), header, rows)
    return 0


def cmd_validate(args):
    config, receivers = _load(args)
    _require_8dpsk(config)
    names = ["j1", "j2", "j3", "avg"]
    header = (["snr_per_bit_db", "receiver"] + _sim_columns(3) + [f"a_{n}" for n in names]
              + [f"z_{n}" for n in names] + ["a_j3_exact", "z_j3_exact", "a_avg_exact", "z_avg_exact",
                                             "trials", "seed"])
    rows = []
    analytic = {}
    for gi, snr, kind, tally in _simulate(config, receivers, args.workers):
        if gi not in analytic:
            analytic[gi] = _analytic_row(resolve_branches(config, gi))
        closed, _, p3x, pavg_x = analytic[gi]
        per_bit, avg = estimate(tally)
        est = per_bit + [avg]
        a = closed.as_tuple()
        z = [e.zscore(v) for e, v in zip(est, a)]
        rows.append([_fmt(snr), int(kind)] + [_fmt(e.estimate) for e in est] + [_fmt(e.std_error) for e in est]
                    + [_fmt(v) for v in a] + [_fmt(v) for v in z]
                    + [_fmt(p3x), _fmt(per_bit[2].zscore(p3x)), _fmt(pavg_x), _fmt(avg.zscore(pavg_x)),
                       tally.trials, config.seed])
    _emit(args, _manifest(args, config, receivers, "validate"), header, rows)
    return 0


def _receiver_list(text):
    kinds = []
    for part in text.split(","):
        try:
            kinds.append(ReceiverKind(int(part)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown receiver {part!r}; use 17, 18, 19 or 20") from None
    return tuple(dict.fromkeys(kinds))


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="mdpsk-div", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file (default: built-in two-branch setup)")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--mode", choices=("direct", "integrated"), help="how rho is obtained from the Doppler model")
    common.add_argument("--stamp", action="store_true", help="record a UTC timestamp in the CSV header")

    p = sub.add_parser("rho", help="print branch correlation coefficients")
    p.add_argument("--config")
    p.add_argument("--kappa", type=float, help="scattering width parameter (default 3)")
    p.add_argument("--fd-T", dest="fd_T", type=float, nargs="+", help="normalized Doppler spread per branch")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("analyze", parents=[common], help="closed-form 8-DPSK error probabilities")
    p.set_defaults(func=cmd_analyze)

    for name, func, text in (("simulate", cmd_simulate, "Monte Carlo error probabilities"),
                             ("validate", cmd_validate, "Monte Carlo against the closed forms")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--seed", type=_seed)
        p.add_argument("--trials", type=int)
        p.add_argument("--receiver", type=_receiver_list, help="comma list of 17, 18, 19, 20")
        p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"mdpsk-div: config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"mdpsk-div: numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
