"""Command-line front end: ``superbath <command> [--config FILE] [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (including
a failed ``validate`` check).  Errors go to stderr as ``error:<kind>: <msg>``.
All outputs are collected in memory and written only after the whole
computation succeeded.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, ConvergenceError, SingularityError

__all__ = ["main", "run", "format_csv"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
_GAPS = ("lower", "middle", "upper")


def _fmt(v):
    return format(float(v), ".17g")


def format_csv(header, rows):
    """Comma-separated text with a header row and 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _pmap(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _emitters(cfg, need=1, default=True):
    ems = cfgmod.emitters_from(cfg)
    if not ems and default:
        from .selfenergy import EmitterConfig

        ems = [EmitterConfig()]
    if len(ems) < need:
        raise ConfigError(f"this command needs at least {need} emitter(s)")
    return ems


def _times(block, quick):
    t_max = float(block.get("t_max", 20.0))
    num = int(block.get("num_t", 201))
    if quick:
        num = min(num, 41)
    return np.linspace(0.0, t_max, num)


def _sweep(block, quick):
    num = block["num"]
    if quick:
        num = min(num, 9)
    return np.linspace(block["min"], block["max"], num)


# -- commands -----------------------------------------------------------------

def cmd_bands(cfg, quick, threads):
    from .lattice import density_of_states, dispersion, k_grid, mixing

    p = cfgmod.bath_from(cfg)
    blk = cfg.get("bands", {})
    n = min(blk.get("grid_n", p.N), 32) if quick else blk.get("grid_n", p.N)
    k = k_grid(n)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    w = dispersion(k1, k2, p)
    mx = mixing(k1, k2, p)
    rows = np.column_stack([a.ravel() for a in (k1, k2, w, -w, mx.cos_theta, mx.sin_theta,
                                                   mx.phi)])
    dos = density_of_states(p, blk.get("dos_grid_n", 64 if quick else 256),
                            blk.get("dos_bins", 200))
    width = dos.edges[1] - dos.edges[0]
    return {
        "bands.csv": format_csv(["k1", "k2", "omega_upper", "omega_lower", "cos_theta",
                                 "sin_theta", "phi"], rows),
        "dos.csv": format_csv(["E", "density", "mass"],
                              zip(dos.centers, dos.mass / width, dos.mass)),
    }


def cmd_selfenergy(cfg, quick, threads):
    from .selfenergy import self_energy_analytic, self_energy_ksum

    p = cfgmod.bath_from(cfg)
    blk = cfg.get("selfenergy", {})
    w = p.outer_edge
    rng = blk.get("energies", {"min": -w - 1.0, "max": w + 1.0, "num": 401})
    energies = _sweep(rng, quick)
    g = _emitters(cfg)[0].g
    ksum_n = blk.get("ksum_grid_n", 0)
    if quick and ksum_n:
        ksum_n = min(ksum_n, 256)

    def one(E):
        row = [E]
        for sub in ("A", "B"):
            try:
                s = self_energy_analytic(float(E), sub, g, p)
            except SingularityError:
                s = complex(np.nan, np.nan)
            row += [s.real, s.imag, max(0.0, -2.0 * s.imag)]
        if ksum_n:
            s = self_energy_ksum(complex(E), "A", g, p, ksum_n)
            row += [s.real, s.imag]
        return row

    header = ["E", "Re_Sigma_A", "Im_Sigma_A", "Gamma_A", "Re_Sigma_B", "Im_Sigma_B", "Gamma_B"]
    if ksum_n:
        header += ["Re_Sigma_A_ksum", "Im_Sigma_A_ksum"]
    return {"selfenergy.csv": format_csv(header, _pmap(one, energies, threads))}


def _pole_listing(e, p, with_up=True):
    from .spectral import find_bound_states, find_unstable_poles

    out = {"emitter": {"sublattice": e.sublattice, "site": list(e.site), "Delta": e.Delta,
                       "g": e.g},
           "bound_states": [{"energy": b.energy, "residue": b.residue, "gap": b.gap,
                             "near_edge": b.near_edge} for b in find_bound_states(e, p)]}
    if with_up:
        out["unstable_poles"] = [{"re": u.z.real, "im": u.z.imag, "region": u.region,
                                  "residue_re": u.residue.real, "residue_im": u.residue.imag}
                                 for u in find_unstable_poles(e, p)]
    return out


def cmd_boundstates(cfg, quick, threads):
    from dataclasses import replace

    from .spectral import find_bound_states

    p = cfgmod.bath_from(cfg)
    ems = _emitters(cfg)
    blk = cfg.get("boundstates", {})
    with_up = blk.get("unstable_poles", True)
    files = {"poles.json": _json([_pole_listing(e, p, with_up) for e in ems])}
    if "sweep" in blk:
        base = ems[0]

        def one(D):
            found = {b.gap: b for b in find_bound_states(replace(base, Delta=float(D)), p)}
            row = [D]
            for gap in _GAPS:
                b = found.get(gap)
                row += [b.energy, b.residue] if b else [np.nan, np.nan]
            return row

        header = ["Delta"] + [f"{c}_{gap}" for gap in _GAPS for c in ("E", "R")]
        files["boundstates.csv"] = format_csv(header, _pmap(one, _sweep(blk["sweep"], quick),
                                                            threads))
    return files


def _amplitude_csv(times, named, parts=()):
    """t, then Re/Im/abs2 for each named amplitude, then Re/Im for each part."""
    header, cols = ["t"], [times]
    for name, v in named:
        header += [f"Re_{name}", f"Im_{name}", f"abs2_{name}"]
        cols += [v.real, v.imag, np.abs(v) ** 2]
    for name, v in parts:
        v = np.broadcast_to(np.asarray(v, dtype=complex), times.shape)
        header += [f"Re_{name}", f"Im_{name}"]
        cols += [v.real, v.imag]
    return format_csv(header, np.column_stack(cols))


def cmd_dynamics(cfg, quick, threads):
    from .dynamics import excited_amplitude, two_emitter_amplitudes

    p = cfgmod.bath_from(cfg)
    ems = _emitters(cfg)
    blk = cfg.get("dynamics", {})
    times = _times(blk, quick)
    if len(ems) >= 2:
        c1, c2, o1, o2 = two_emitter_amplitudes(times, ems[0], ems[1], p, blk.get("grid_n", 512),
                                                blk.get("collective", True), return_others=True)
        return {"dynamics.csv": _amplitude_csv(times, [("C1", c1), ("C2", c2)],
                                               [("others_C1", o1), ("others_C2", o2)])}
    br = excited_amplitude(times, ems[0], p)
    text = _amplitude_csv(times, [("C_e", br.total)], br.contributions.items())
    return {"dynamics.csv": text,
            "poles.json": _json({"bound_states": [{"energy": b.energy, "residue": b.residue,
                                                   "gap": b.gap} for b in br.bound_states],
                                 "unstable_poles": [{"re": u.z.real, "im": u.z.imag,
                                                     "region": u.region}
                                                    for u in br.unstable_poles],
                                 "bcd_error": br.bcd_error})}


def cmd_exchange(cfg, quick, threads):
    from dataclasses import replace

    from .dynamics import exchange_coupling

    p = cfgmod.bath_from(cfg)
    e = _emitters(cfg)[0]
    blk = cfg.get("exchange", {})
    lo, hi = blk.get("n_min", 2), blk.get("n_max", 8)
    if hi < lo:
        raise ConfigError("exchange: n_max < n_min")
    if quick:
        hi = min(hi, lo + 2)
    grid_n = blk.get("grid_n", 512)

    def one(n):
        v = exchange_coupling(e, replace(e, site=(e.site[0] + n, e.site[1])), p, grid_n).J_ex
        d = exchange_coupling(e, replace(e, site=(e.site[0] + n, e.site[1] + n)), p, grid_n).J_ex
        return [n, v, d, v / d if d != 0 else np.inf]

    return {"exchange.csv": format_csv(["n", "J_ex_vertical", "J_ex_diagonal", "ratio"],
                                       _pmap(one, range(lo, hi + 1), threads))}


def cmd_wavefunction(cfg, quick, threads):
    from .spectral import find_bound_states, residue_of
    from .wavefunction import axis_asymptotics, axis_cut, bs_real_space

    p = cfgmod.bath_from(cfg)
    if quick:
        from dataclasses import replace

        p = replace(p, N=min(p.N, 64))
    e = _emitters(cfg)[0]
    blk = cfg.get("wavefunction", {})
    E = blk.get("E_BS")
    residue = None
    if E is None:
        mbs = [b for b in find_bound_states(e, p) if b.gap == "middle"]
        if not mbs:
            raise ConvergenceError("no middle bound state for this emitter")
        E, residue = mbs[0].energy, mbs[0].residue
    elif e.g > 0:
        try:
            residue = residue_of(E, e, p)
        except ValueError:
            residue = None
    wf = bs_real_space(E, e, p)
    N = p.N
    shift = (N // 2 - e.site[0], N // 2 - e.site[1])
    rel = np.arange(N) - N // 2
    files = {}
    for sub, grid in (("A", wf.C_A), ("B", wf.C_B)):
        centred = np.roll(np.abs(grid), shift, axis=(0, 1))
        rows = np.column_stack([rel, centred])
        files[f"wavefunction_abs_{sub}.csv"] = format_csv(
            ["n1"] + [f"n2={v}" for v in rel], rows)
    n_axis = min(blk.get("n_axis", 60), N // 2)
    n = np.arange(1, n_axis + 1)
    ca = np.array([wf.relative("A", int(k), 0) for k in n])
    cb = np.array([wf.relative("B", int(k), 0) for k in n])
    kern = axis_cut(E, p, n_axis)[1:]
    asym = axis_asymptotics(n, p.delta / p.J, blk.get("q_c", np.pi)) if p.delta > 0 else \
        np.full(n.size, np.nan)
    files["axis_cut.csv"] = format_csv(
        ["n", "Re_C_A", "abs_C_A", "abs_C_B", "kernel", "asymptotic"],
        np.column_stack([n, ca.real, np.abs(ca), np.abs(cb), kern, asym]))
    files["summary.json"] = _json({"E_BS": float(E), "C_e_abs2": abs(wf.C_e) ** 2,
                                   "residue": residue, "norm": wf.norm, "N": N})
    return files


def cmd_protocol(cfg, quick, threads):
    from .spinmodel import (
        ProtocolConfig,
        effective_couplings,
        protocol_fidelity_closed,
        protocol_fidelity_sim,
    )

    p = cfgmod.bath_from(cfg)
    e = _emitters(cfg)[0]
    blk = cfg.get("protocol", {})
    lo, hi = blk.get("n_min", 3), blk.get("n_max", 8)
    if hi < lo:
        raise ConfigError("protocol: n_max < n_min")
    if quick:
        hi = min(hi, lo + 1)
    try:
        base = dict(Delta=e.Delta, g=e.g, bath=p, Gamma_star=blk.get("Gamma_star", 0.0),
                    Omega=blk.get("Omega"), Delta_L=blk.get("Delta_L"),
                    omega_L=blk.get("omega_L", 0.0),
                    detuning_correction=blk.get("detuning_correction", False))
        cfgs = [ProtocolConfig(n=n, **base) for n in range(lo, hi + 1)]
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from None
    grid_n = blk.get("grid_n", 512)

    def one(pc):
        c = effective_couplings(pc, grid_n)
        F, T = protocol_fidelity_closed(c)
        t_run = np.pi / (4.0 * abs(c.J_a)) if pc.detuning_correction else T
        F_loss = protocol_fidelity_sim(pc, c, t_run)
        return [pc.n, c.J_a, c.J_1, c.J_2, F, 1.0 - F, t_run, F_loss]

    header = ["n", "J_a", "J_1", "J_2", "F_max", "one_minus_F_max", "T", "F_with_loss"]
    return {"protocol.csv": format_csv(header, _pmap(one, cfgs, threads))}


def cmd_oracle(cfg, quick, threads):
    from dataclasses import replace

    from . import oracle

    p = cfgmod.bath_from(cfg)
    if quick:
        p = replace(p, N=min(p.N, 24))
    ems = _emitters(cfg)
    try:
        model = oracle.build_model(p, ems)
    except ValueError as exc:
        raise ConfigError(f"oracle: {exc}") from None
    times = _times(cfg.get("dynamics", {}), quick)
    state = oracle.evolve(model, model.emitter_index(0), times)
    if len(ems) >= 2:
        named = [("C1", state[:, model.emitter_index(0)]), ("C2", state[:, model.emitter_index(1)])]
    else:
        named = [("C_e", state[:, model.emitter_index(0)])]
    listing = []
    for gap in _GAPS:
        r = oracle.bound_state_from_spectrum(model, gap)
        if r is not None:
            E, vec = r
            listing.append({"gap": gap, "energy": E,
                            "emitter_weight": float(np.sum(np.abs(vec[2 * p.N**2:]) ** 2))})
    return {"oracle_dynamics.csv": _amplitude_csv(times, named),
            "oracle_poles.json": _json({"N": p.N, "bound_states": listing})}


def cmd_validate(cfg, quick, threads):
    from .validation import run_suite

    blk = cfg.get("validate", {})
    N = blk.get("quick_N", 32) if quick else blk.get("N", 48)
    rows = run_suite(N, t_max=blk.get("t_max", 20.0))
    width = max(len(r.name) for r in rows)
    for r in rows:
        print(f"{r.name:<{width}}  value={r.value:.3e}  limit={r.limit:.1e}  "
              f"{'PASS' if r.passed else 'FAIL'}")
    files = {"validate.csv": "name,value,limit,passed\n" + "".join(
        f"{r.name},{_fmt(r.value)},{_fmt(r.limit)},{int(r.passed)}\n" for r in rows)}
    if not all(r.passed for r in rows):
        failed = ", ".join(r.name for r in rows if not r.passed)
        return files, ConvergenceError(f"validation failed: {failed}")
    return files


COMMANDS = {
    "bands": cmd_bands,
    "selfenergy": cmd_selfenergy,
    "boundstates": cmd_boundstates,
    "dynamics": cmd_dynamics,
    "exchange": cmd_exchange,
    "wavefunction": cmd_wavefunction,
    "protocol": cmd_protocol,
    "oracle": cmd_oracle,
    "validate": cmd_validate,
}


def _parser():
    ap = argparse.ArgumentParser(prog="superbath",
                                 description="Quantum emitters in a 2D photonic superlattice bath.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config (default: the bundled example)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        sp.add_argument("--quick", action="store_true", help="reduced sizes for smoke runs")
    return ap


def _write(files, out):
    os.makedirs(out, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _error(kind, msg):
    print(f"error:{kind}: {msg}", file=sys.stderr)


def run(argv=None) -> int:
    """Parse ``argv`` and run one command; returns the exit code."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = (cfgmod.load_config(args.config) if args.config
               else cfgmod.bundled_config(args.command))
        result = COMMANDS[args.command](cfg, args.quick, args.threads)
    except ConfigError as exc:
        _error("config", exc)
        return EXIT_CONFIG
    except (SingularityError, ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _error("numerical", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        _error("config", exc)
        return EXIT_CONFIG
    failure = None
    if isinstance(result, tuple):
        result, failure = result
    _write(result, args.out)
    if failure is not None:
        _error("numerical", failure)
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run())
