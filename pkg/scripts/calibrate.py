#!/usr/bin/env python3
"""Calibration study driver behind the shipped preset constants.

For each candidate (r_sense, lambda_base) pair this sweeps the density
grid three times (low-rate coverage/lifetime, high-rate lifetime, and
the high-fault parity-fragility slice) and prints the trend numbers the
release gate checks: coverage band and direction, lifetime rank
correlation, x4 energy cost, and the sparse/dense fragility gaps.

The constants in gridwatch.sweep.CAL were picked off this table. Rerun
after any engine change that touches timing, energy, or recovery, and
move CAL if the verdict column flips.

Runtime scales with densities x seeds; --quick cuts both for a smoke
pass (the verdicts are then indicative, not gate-accurate).
"""

import math

import click

from gridwatch.engine import SimConfig
from gridwatch.sweep import CAL, DENSITY_GRID, SweepSpec, run_sweep


def _mean(xs):
    return sum(xs) / len(xs)


def _spearman(xs, ys):
    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        r = [0.0] * len(v)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
                j += 1
            for k in range(i, j + 1):
                r[order[k]] = (i + j) / 2 + 1
            i = j + 1
        return r

    rx, ry = ranks(list(xs)), ranks(list(ys))
    mx, my = _mean(rx), _mean(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx)
                    * sum((b - my) ** 2 for b in ry))
    return num / den if den else float("nan")


def _combo(base, n, *, p, mult, mode, seeds, jobs):
    spec = SweepSpec(
        base=base, n_sensors=[n], p_fail=[p], wake_multiplier=[mult],
        recovery_mode=[mode], repeats=seeds, seed_base=0,
    )
    return run_sweep(spec, jobs=jobs).outcomes


def _study(r_sense, lambda_base, densities, seeds, p_mid, p_high, jobs):
    cal = dict(CAL, r_sense=r_sense, lambda_base=lambda_base)
    low = SimConfig(wake_multiplier=1.0, recovery_mode="sum",
                    t_max=600.0, stop_at_lifetime=True, **cal)
    past = SimConfig(wake_multiplier=4.0, recovery_mode="sum",
                     t_max=40.0, stop_at_lifetime=False, **cal)

    cov, life = {}, {}
    for n in densities:
        outs = _combo(low, n, p=p_mid, mult=1.0, mode="sum", seeds=seeds, jobs=jobs)
        cov[n] = _mean([o.coverage_rate for o in outs])
        life[n] = _mean([o.lifetime for o in outs])
        click.echo(
            f"    n={n:<5d} coverage={cov[n]:.3f} lifetime={life[n]:8.1f}"
        )

    ends = (min(densities), max(densities))
    life4 = {}
    for n in ends:
        outs = _combo(low, n, p=p_mid, mult=4.0, mode="sum", seeds=seeds, jobs=jobs)
        life4[n] = _mean([o.lifetime for o in outs])

    rfr = {}
    for n in ends:
        for mode in ("sum", "xor"):
            outs = _combo(past, n, p=p_high, mult=4.0, mode=mode, seeds=seeds, jobs=jobs)
            rfr[(n, mode)] = _mean([o.recovery_failure_rate for o in outs])

    rho = _spearman(densities, [life[n] for n in densities])
    gap_sparse = rfr[(ends[0], "xor")] - rfr[(ends[0], "sum")]
    gap_dense = rfr[(ends[1], "xor")] - rfr[(ends[1], "sum")]
    checks = {
        "band": all(0.35 <= c <= 0.65 for c in cov.values()),
        "cov-direction": cov[ends[1]] >= cov[ends[0]],
        "spearman>=0.9": rho >= 0.9,
        "x4-costs": all(life4[n] < life[n] for n in ends),
        "gap>=10pp": gap_sparse >= 0.10,
        "dense<=half": gap_dense <= gap_sparse / 2,
    }
    verdict = "OK " if all(checks.values()) else "no "
    bad = " ".join(k for k, v in checks.items() if not v)
    click.echo(
        f"  {verdict} r_sense={r_sense} lambda_base={lambda_base} "
        f"cov=[{min(cov.values()):.3f},{max(cov.values()):.3f}] rho={rho:.2f} "
        f"x4={life4[ends[0]]:.1f}/{life[ends[0]]:.1f} "
        f"gaps={gap_sparse * 100:.1f}pp/{gap_dense * 100:.1f}pp"
        + (f"  FAILS: {bad}" if bad else "")
    )


@click.command()
@click.option("--r-sense", "r_senses", type=float, multiple=True,
              default=(CAL["r_sense"],), show_default=True)
@click.option("--lambda-base", "lambda_bases", type=float, multiple=True,
              default=(CAL["lambda_base"],), show_default=True)
@click.option("--seeds", type=int, default=20, show_default=True)
@click.option("--p-mid", type=float, default=0.02, show_default=True,
              help="Fault rate for the coverage/lifetime slices.")
@click.option("--p-high", type=float, default=0.08, show_default=True,
              help="Fault rate for the fragility slice.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--quick", is_flag=True,
              help="4 densities, 5 seeds: fast but indicative only.")
def main(r_senses, lambda_bases, seeds, p_mid, p_high, jobs, quick):
    densities = list(DENSITY_GRID)
    if quick:
        densities = [200, 400, 800, 1600]
        seeds = min(seeds, 5)
    for rs in r_senses:
        for lb in lambda_bases:
            click.echo(f"candidate r_sense={rs} lambda_base={lb}")
            _study(rs, lb, densities, seeds, p_mid, p_high, jobs)


if __name__ == "__main__":
    main()
