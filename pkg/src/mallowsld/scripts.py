# -*- coding: utf-8 -*-
"""Command line experiments writing CSV tables and a JSON summary."""

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from collections import namedtuple

import numpy as np

from . import foursquare, measures, pressure, sampler

logger = logging.getLogger(__name__)

ERR_UNKNOWN_KEY = "mallowsld: error: unknown configuration key `{}` for `{}`"
ERR_NOT_FLAT = "mallowsld: error: configuration file must hold a flat JSON " \
    "object"
ERR_REPLICAS = "mallowsld: error: replica count must be at least 1"
ERR_BUDGET = "mallowsld: error: the enumeration oracle is limited to " \
    "n <= {}, use --no-oracle for larger n"
ERR_CHECK = "mallowsld: error: check `{}` failed: {}"
ERR_TYPE = "mallowsld: error: configuration key `{}` must be {}, got {!r}"
PREFIX = "mallowsld: "
ERROR_PREFIX = PREFIX + "error: "

COMMON = {'seed': 0, 'out': None, 'summary': None, 'threads': 1,
          'verbose': False}

DEFAULTS = {
    'pressure': {'betas': [-2.0, 0.0, 2.0], 'ns': [1000]},
    'rfun': {'thetas': [round(0.1 * k, 1) for k in range(1, 10)],
             'betas': [-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0]},
    'sample': {'n': 1000, 'beta': 2.0, 'theta1': 0.5, 'theta2': 0.5},
    'converge': {'ns': [2000, 8000], 'beta': 2.0, 'replicas': 200,
                 'theta1': 0.5, 'theta2': 0.5},
    'foursquare-exact': {'n': 6, 'q': 0.25, 'theta1': 0.4, 'theta2': 0.6,
                         'oracle': True},
    'ratefn': {'betas': [-2.0, 2.0], 'ms': [64, 128, 256]},
}


class AcceptanceError(AssertionError):
    pass


Check = namedtuple('Check', ['name', 'passed', 'detail'])
Report = namedtuple('Report', ['header', 'rows', 'checks', 'extra'])


class RunConfig(namedtuple('RunConfig', ['command', 'params', 'seed', 'out',
                                         'summary', 'threads', 'verbose'])):
    __slots__ = ()

    def resolved(self):
        # out, summary, threads and verbose do not change the results
        data = dict(self.params, command=self.command, seed=self.seed)
        return data

    def config_hash(self):
        blob = json.dumps(self.resolved(), sort_keys=True)
        return hashlib.sha256(blob.encode('utf-8')).hexdigest()[:16]

    def __getattr__(self, name):
        try:
            return self.params[name]
        except KeyError:
            raise AttributeError(name)


# ==================== #
#   Configuration      #
# ==================== #

def load_config(path):
    with open(path, 'r') as f:
        data = json.load(f)
    if not isinstance(data, dict) or any(
            isinstance(v, dict) for v in data.values()):
        raise ValueError(ERR_NOT_FLAT)
    return data


def resolve_config(command, flags, file_values=None):
    """Layer defaults, configuration file values and explicit flags."""
    defaults = dict(COMMON, **DEFAULTS[command])
    merged = dict(defaults)
    for layer in (file_values or {}, flags):
        for key, value in layer.items():
            if key not in merged:
                raise ValueError(ERR_UNKNOWN_KEY.format(key, command))
            merged[key] = value
    merged = {k: _coerce(k, v, defaults[k]) for k, v in merged.items()}
    common = {k: merged.pop(k) for k in COMMON}
    config = RunConfig(command=command, params=merged, **common)
    _validate(config)
    return config


def _coerce(key, value, default):
    """Check a value against the type of its default; ints widen to float."""
    if isinstance(default, list):
        if isinstance(value, list) and value:
            return [_coerce(key, v, default[0]) for v in value]
        expected = "a non-empty list"
    elif default is None:
        if value is None or isinstance(value, str):
            return value
        expected = "a path"
    elif isinstance(default, bool):
        if isinstance(value, bool):
            return value
        expected = "true or false"
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        expected = "an integer"
    else:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        expected = "a number"
    raise ValueError(ERR_TYPE.format(key, expected, value))


def _validate(config):
    if config.threads < 1:
        raise ValueError("mallowsld: error: --threads must be at least 1")
    if config.command == 'converge' and config.replicas < 1:
        raise ValueError(ERR_REPLICAS)
    if config.command == 'foursquare-exact' and config.oracle \
            and config.n > foursquare.ENUMERATION_BUDGET:
        raise ValueError(ERR_BUDGET.format(foursquare.ENUMERATION_BUDGET))


def _parser():
    common = argparse.ArgumentParser(add_help=False,
                                     argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="root seed (default 0)")
    common.add_argument("--out", help="CSV destination (default stdout)")
    common.add_argument("--summary",
                        help="JSON summary destination (default <out>.json)")
    common.add_argument("--config", help="flat JSON file of settings")
    common.add_argument("--threads", type=int,
                        help="worker threads for replicas and enumeration")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="report progress on stderr")

    parser = argparse.ArgumentParser(
        prog="mallowsld",
        description="Numerical experiments on the large deviations of "
        "Mallows random permutations.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("pressure", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="p(beta), p_n(beta) and the q-Stirling remainder")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--ns", type=int, nargs="+")

    p = sub.add_parser("rfun", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="closed form R_beta against the critical point "
                       "solver")
    p.add_argument("--thetas", type=float, nargs="+")
    p.add_argument("--betas", type=float, nargs="+")

    p = sub.add_parser("sample", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="one mu_{n,beta} configuration")
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)

    p = sub.add_parser("converge", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="Monte Carlo convergence of n11/n to R_beta")
    p.add_argument("--ns", type=int, nargs="+")
    p.add_argument("--beta", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)

    p = sub.add_parser("foursquare-exact", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="exact four-square law against enumeration")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--no-oracle", dest="oracle", action="store_false",
                   default=argparse.SUPPRESS)

    p = sub.add_parser("ratefn", parents=[common],
                       argument_default=argparse.SUPPRESS,
                       help="rate function of uniform and limiting measures")
    p.add_argument("--betas", type=float, nargs="+")
    p.add_argument("--ms", type=int, nargs="+")
    return parser


# ==================== #
#   Commands           #
# ==================== #

def cmd_pressure(config):
    """One block of rows per n, each opened by a `# n=<n>` comment."""
    rows, large = [], []
    for n in config.ns:
        table = pressure.pressure_table(config.betas, n)
        rows.append("n={}".format(n))
        rows.extend(table)
        if n >= 10000:
            large.extend(table)
    # p does not depend on n
    p_of = {row[0]: row[1] for row in rows if not isinstance(row, str)}
    checks = [Check("p_zero_exact",
                    all(p == 0.0 for beta, p in p_of.items() if beta == 0),
                    "")]
    gaps = [abs(p_of[-b] - p_of[b] - b / 2.0) for b in p_of if b > 0
            and -b in p_of]
    if gaps:
        checks.append(Check("reflection", max(gaps) <= 1e-12,
                            "max gap {!r}".format(max(gaps))))
    if large:
        worst = max(abs(pn - p) for _, p, pn, _ in large)
        checks.append(Check("finite_volume", worst < 5e-4,
                            "max |p_n - p| {!r}".format(worst)))
    return Report(['beta', 'p', 'p_n', 'remainder'], rows, checks,
                  {'ns': list(config.ns)})


def cmd_rfun(config):
    rows, gaps, phis, first_bad = [], [], [], None
    for theta1 in config.thetas:
        for theta2 in config.thetas:
            for beta in config.betas:
                r = float(foursquare.closed_form_R(theta1, theta2, beta))
                s = foursquare.solve_critical_t(theta1, theta2, beta)
                rho = float(foursquare.density_rho(theta1, theta2, beta))
                if 0 < theta1 < 1 and 0 < theta2 < 1:
                    value = foursquare.phi(
                        foursquare.DiagonalParam(theta1, theta2, r), beta)
                    phis.append(abs(value))
                else:
                    value = None
                row = (theta1, theta2, beta, r, s, rho, value)
                gaps.append(abs(r - s))
                if first_bad is None and (abs(r - s) > 1e-12 or (
                        value is not None and abs(value) > 1e-8)):
                    first_bad = row
                rows.append(row)
    detail = "row {}".format(_format_row(first_bad)) if first_bad else ""
    checks = [Check("solver_agreement", max(gaps) <= 1e-12, detail),
              Check("phi_at_R", not phis or max(phis) <= 1e-8, detail)]
    return Report(['theta1', 'theta2', 'beta', 'R_closed', 'R_solver', 'rho',
                   'phi_at_R'], rows, checks, {})


def cmd_sample(config):
    rng = sampler.make_stream(config.seed)
    cfg = sampler.sample_configuration(config.n, config.beta, rng)
    counts = sampler.four_square_counts(cfg, config.theta1, config.theta2)
    checks = [Check("counts_total", counts.n == config.n, str(tuple(counts)))]
    return Report(['x', 'y'], [tuple(p) for p in cfg.points], checks,
                  {'counts': counts._asdict()})


def cmd_converge(config):
    target = float(foursquare.closed_form_R(config.theta1, config.theta2,
                                            config.beta))
    rows, checks, stds = [], [], []
    for n in config.ns:
        values = sampler.empirical_cdf_replicas(
            n, config.beta, config.theta1, config.theta2, [config.seed, n],
            config.replicas, config.threads)
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        band = 3.0 * std / math.sqrt(values.size)
        ok = abs(mean - target) <= band
        rows.append((n, config.replicas, mean, std, target,
                     abs(mean - target), band, ok))
        checks.append(Check("band_n{}".format(n), ok,
                            "|mean - R| = {!r}".format(abs(mean - target))))
        stds.append(std)
    for (n1, s1), (n2, s2) in zip(zip(config.ns, stds),
                                  zip(config.ns[1:], stds[1:])):
        expected = math.sqrt(float(n2) / n1)
        ratio = s1 / s2 if s2 > 0 else math.inf
        checks.append(Check("scaling_n{}_n{}".format(n1, n2),
                            0.8 * expected <= ratio <= 1.3 * expected,
                            "std ratio {!r}, expected {!r}".format(
                                ratio, expected)))
    return Report(['n', 'replicas', 'mean', 'std', 'R', 'abs_dev', 'band',
                   'within_band'], rows, checks, {'R': target})


def cmd_foursquare_exact(config):
    n = config.n
    beta = -(n - 1) * math.log(config.q)
    rows, formula, worst = [], [], 0.0
    for counts in foursquare.all_counts(n):
        pf = foursquare.discrete_four_square_prob(
            counts, config.theta1, config.theta2, n, beta)
        formula.append(pf)
        if config.oracle:
            po = foursquare.discrete_four_square_oracle(
                counts, config.theta1, config.theta2, n, beta,
                threads=config.threads)
            relerr = abs(pf - po) / po if po > 0 else abs(pf)
            worst = max(worst, relerr)
        else:
            po = relerr = None
        rows.append(tuple(counts) + (pf, po, relerr))
    total = math.fsum(formula)
    checks = [Check("total_probability", abs(total - 1.0) <= 1e-12,
                    "sum {!r}".format(total))]
    extra = {'beta': beta}
    if config.oracle:
        checks.append(Check("max_relerr", worst <= 1e-12,
                            "max relerr {!r}".format(worst)))
        extra['max_relerr'] = worst
    return Report(['n11', 'n12', 'n21', 'n22', 'p_formula', 'p_oracle',
                   'relerr'], rows, checks, extra)


def cmd_ratefn(config):
    rows, checks = [], []
    for beta in config.betas:
        trail = []
        for m in sorted(config.ms):
            uniform = measures.rate_function(measures.GridMeasure.uniform(m),
                                             beta)
            rho = foursquare.discretize_density(beta, m)
            rate = measures.rate_function(rho, beta)
            rows.append((m, beta, uniform, rate,
                         measures.relative_entropy(rho),
                         measures.energy(rho)))
            expected = beta / 4.0 + pressure.pressure(beta)
            checks.append(Check("uniform_m{}_beta{}".format(m, beta),
                                abs(uniform - expected) <= 1e-10,
                                "{!r} vs {!r}".format(uniform, expected)))
            checks.append(Check("nonnegative_m{}_beta{}".format(m, beta),
                                rate >= -1e-6, repr(rate)))
            if m >= 256:
                checks.append(Check("small_m{}_beta{}".format(m, beta),
                                    rate <= 5e-3, repr(rate)))
            trail.append(rate)
        checks.append(Check("refinement_beta{}".format(beta),
                            all(a >= b for a, b in zip(trail, trail[1:])),
                            repr(trail)))
    return Report(['m', 'beta', 'rate_uniform', 'rate_rho', 'entropy_rho',
                   'energy_rho'], rows, checks, {})


COMMANDS = {
    'pressure': cmd_pressure,
    'rfun': cmd_rfun,
    'sample': cmd_sample,
    'converge': cmd_converge,
    'foursquare-exact': cmd_foursquare_exact,
    'ratefn': cmd_ratefn,
}


# ==================== #
#   Output             #
# ==================== #

def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _format_row(row):
    return ",".join(_format_value(v) for v in row)


def render_csv(config, report):
    buf = io.StringIO()
    buf.write("# mallowsld {} {}\n".format(get_version(), config.command))
    buf.write("# config_hash={} seed={}\n".format(config.config_hash(),
                                                  config.seed))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.header)
    for row in report.rows:
        if isinstance(row, str):
            buf.write("# {}\n".format(row))
            continue
        writer.writerow([_format_value(v) for v in row])
    return buf.getvalue()


def render_summary(config, report):
    summary = {
        'command': config.command,
        'version': get_version(),
        'seed': config.seed,
        'config_hash': config.config_hash(),
        'config': config.resolved(),
        'checks': {c.name: {'passed': bool(c.passed), 'detail': c.detail}
                   for c in report.checks},
        'passed': all(c.passed for c in report.checks),
    }
    summary.update(report.extra)
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def run(config):
    """Run one command and write its outputs; returns the Report."""
    report = COMMANDS[config.command](config)
    text = render_csv(config, report)
    if config.out:
        with open(config.out, 'w', newline='') as f:
            f.write(text)
        logger.info("wrote %s", config.out)
    else:
        sys.stdout.write(text)
    summary_path = config.summary or (config.out + ".json"
                                      if config.out else None)
    if summary_path:
        with open(summary_path, 'w') as f:
            f.write(render_summary(config, report))
        logger.info("wrote %s", summary_path)
    for check in report.checks:
        if not check.passed:
            raise AcceptanceError(ERR_CHECK.format(check.name, check.detail))
    return report


def cli(argv=None):
    args = vars(_parser().parse_args(argv))
    command = args.pop('command')
    config_path = args.pop('config', None)
    logging.basicConfig(
        level=logging.INFO if args.get('verbose') else logging.WARNING,
        format="%(name)s: %(message)s")
    try:
        file_values = load_config(config_path) if config_path else None
        config = resolve_config(command, args, file_values)
        run(config)
    except AcceptanceError as e:
        raise SystemExit(str(e))
    except (OSError, ValueError, ArithmeticError, TypeError) as e:
        raise SystemExit(error_message(e))


def error_message(exc):
    """Every message leaves as `mallowsld: error: ...`."""
    msg = str(exc)
    if msg.startswith(ERROR_PREFIX):
        return msg
    if msg.startswith(PREFIX):
        msg = msg[len(PREFIX):]
    return ERROR_PREFIX + msg


def get_version():
    try:
        from importlib.metadata import PackageNotFoundError, version
        try:
            return version("mallowsld")
        except PackageNotFoundError:
            pass
    except ImportError:
        pass
    import os
    import re
    p = os.path.join(os.path.dirname(__file__), '__init__.py')
    pattern = re.compile(r"^__version__ = '(.*)'")
    with open(p) as f:
        for line in f:
            ver = re.match(pattern, line)
            if ver:
                return ver.group(1)
    return "unknown"
