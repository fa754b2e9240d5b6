"""Config-driven command line front end.

Usage: rydress <command> <config.toml> [output_dir] [--threads N]

Commands: profile, sweep, gpe-evolve, gpe-ground, bogoliubov, stability,
verify. Each run writes its data files, a generated matplotlib plot script
consuming only those files, and a manifest with sha256 digests (the verify
command re-hashes them). Outputs are byte-reproducible for a fixed config
and seed, independent of the thread count.

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 calibration target unreachable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bogoliubov import roton_instabilities, spectrum
from .configio import (
    ConfigError,
    Section,
    check_known,
    load_config,
    parse_calibration,
    parse_contact,
    parse_dressing,
    parse_grid,
    parse_hbar_over_m,
    parse_synthetic_kernel,
    parse_trap,
)
from .gpe import (
    Field,
    Grid,
    evolve_imaginary,
    evolve_real,
    initial_two_soliton,
    observables,
    radial_structure_factor,
    tabulate_kernel,
    uniform_field,
)
from .kernels import RadialKernel
from .params import DressingParams
from .profiles import (
    CalibrationRangeError,
    analytic_radii,
    calibrate_omega1,
    default_r_grid,
    extract_features,
    interaction_profile,
    sweep as run_sweep,
)
from .runio import RunManifest, Stopwatch, verify_manifest, write_csv, write_field_snapshot, write_json
from .steady import DegenerateSteadyStateError
from .stability import (
    molecule_energy_landscape,
    soliton_energy_landscape,
    stability_window,
)
from .units import hz, khz, mhz, rad_per_us

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_CALIBRATION = 4

OUTPUT_ROOT_ENV = "RYDRESS_OUTPUT_ROOT"


def _params_echo(params: DressingParams) -> dict:
    lock = params.lock
    return {
        "omega1_mhz": mhz(params.omega1),
        "omega2_mhz": mhz(params.omega2),
        "delta_mhz": mhz(params.delta),
        "gamma1_mhz": mhz(params.gamma1),
        "gamma2_mhz": mhz(params.gamma2),
        "lock": lock.kind if lock.kind != "custom" else mhz(lock.value),
        "gamma_p_mhz": mhz(params.gamma_p),
        "gamma_r_mhz": mhz(params.gamma_r),
        "c6_mhz_um6": mhz(params.c6),
        "n": params.n,
    }


def _features_echo(feats) -> dict:
    d = feats.as_dict()
    out = {}
    for key, value in d.items():
        if value is None:
            out[key] = None
        elif key.startswith("u_") or key == "delta_eit":
            out[key + "_khz"] = khz(value)
        elif key.startswith("r_"):
            out[key + "_um"] = value
        else:
            out[key] = value
    return out


def _resolve_outdir(args, command: str) -> Path:
    if args.output_dir is not None:
        out = Path(args.output_dir)
    else:
        root = Path(os.environ.get(OUTPUT_ROOT_ENV, "."))
        out = root / f"{Path(args.config).stem}_{command.replace('-', '_')}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_plot_script(outdir: Path, name: str, body: str) -> Path:
    path = outdir / name
    path.write_text("#!/usr/bin/env python3\n" + body)
    return path


def _maybe_calibrate(params, cfg) -> tuple[DressingParams, dict]:
    calib = parse_calibration(cfg)
    if calib is None:
        return params, {}
    om1 = calibrate_omega1(params, calib["gamma_target"],
                           omega1_range=calib["omega1_range"],
                           calibration_points=calib["calibration_points"])
    return params.with_(omega1=om1), {
        "calibrated_omega1_mhz": mhz(om1),
        "gamma_target_hz": hz(calib["gamma_target"]),
    }


PLOT_PROFILE = """\
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("profile.csv", delimiter=",", names=True)
fig, ax1 = plt.subplots(figsize=(6, 4))
ax1.plot(data["r_um"], data["U_over_2pi_kHz"], "b-", label="U/2pi (kHz)")
ax1.axhline(0, color="gray", lw=0.5)
ax1.set_xlabel("r (um)")
ax1.set_ylabel("U/2pi (kHz)", color="b")
ax2 = ax1.twinx()
ax2.plot(data["r_um"], data["Gamma_Hz"], "r--", label="Gamma (Hz)")
ax2.set_ylabel("Gamma (Hz)", color="r")
fig.tight_layout()
fig.savefig("profile.png", dpi=160)
"""


def cmd_profile(args) -> int:
    cfg = load_config(args.config)
    params = parse_dressing(cfg)
    sec = Section(cfg.get("profile"), "profile")
    check_known(sec, {"points", "r_min_um", "r_max_um"})
    points = sec.integer("points", 240)
    if points < 1:
        raise ConfigError("profile.points: must be >= 1")
    params, calib_info = _maybe_calibrate(params, cfg)
    r_min, r_max = sec.number("r_min_um"), sec.number("r_max_um")
    if (r_min is None) != (r_max is None):
        raise ConfigError("profile.r_min_um / r_max_um: give both or neither")
    if r_min is not None:
        if not (0 < r_min < r_max):
            raise ConfigError("profile.r_min_um: need 0 < r_min_um < r_max_um")
        grid = np.geomspace(r_min, r_max, points)
    else:
        grid = default_r_grid(params, points)

    with Stopwatch() as clock:
        prof = interaction_profile(params, grid, threads=args.threads)
        feats = extract_features(prof)

    outdir = _resolve_outdir(args, "profile")
    manifest = RunManifest(command="profile", config=cfg)
    csv = write_csv(outdir / "profile.csv",
                    ["r_um", "U_over_2pi_kHz", "Gamma_Hz"],
                    [(r, khz(u), hz(g)) for r, u, g in zip(prof.r, prof.u, prof.gamma)])
    meta = write_json(outdir / "profile.json", {
        "params": _params_echo(params),
        "calibration": calib_info,
        "features": _features_echo(feats),
        "analytic_radii_um": analytic_radii(params),
        "u_infinity_khz": khz(prof.u_infinity),
        "loss_infinity_hz": hz(prof.loss_infinity),
        "failures": list(prof.failures),
    })
    plot = _write_plot_script(outdir, "plot_profile.py", PLOT_PROFILE)
    for p in (csv, meta, plot):
        manifest.add_output(p)
    manifest.wall_clock_s = clock.elapsed
    manifest.save(outdir)
    print(f"profile: {len(prof.r)} points -> {outdir}")
    return EXIT_OK


SWEEP_AXES_MHZ = {"omega1", "omega2", "delta", "gamma1", "gamma2", "gamma_p",
                  "gamma_r", "gamma12", "c6"}

PLOT_SWEEP = """\
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("sweep.csv", delimiter=",", names=True)
axis = data.dtype.names[0]
fig, ax = plt.subplots(figsize=(6, 4))
for col, style in [("u_c_khz", "-"), ("u_ip_khz", ":"), ("u_op_khz", "-."),
                   ("u_well_khz", "--")]:
    if col in data.dtype.names:
        vals = data[col]
        ax.plot(data[axis], np.abs(vals), style, label=col)
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel(axis)
ax.set_ylabel("|U|/2pi (kHz)")
ax.legend()
fig.tight_layout()
fig.savefig("sweep.png", dpi=160)
"""


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    params = parse_dressing(cfg)
    sec = Section(cfg.get("sweep"), "sweep")
    check_known(sec, {"axis", "values_mhz", "start_mhz", "stop_mhz", "points",
                      "spacing", "profile_points", "calibration_points"})
    axis = sec.text("axis", required=True)
    if axis not in SWEEP_AXES_MHZ:
        raise ConfigError(f"sweep.axis: {axis!r} not one of {sorted(SWEEP_AXES_MHZ)}")
    values_mhz = sec.numbers("values_mhz")
    if values_mhz is None:
        start = sec.number("start_mhz", required=True)
        stop = sec.number("stop_mhz", required=True)
        npts = sec.integer("points", required=True)
        spacing = sec.text("spacing", "log", choices={"log", "linear"})
        if npts < 1 or start <= 0 and spacing == "log":
            raise ConfigError("sweep: bad start/points for log spacing")
        values_mhz = list(np.geomspace(start, stop, npts) if spacing == "log"
                          else np.linspace(start, stop, npts))
    values = [rad_per_us(v) for v in values_mhz]

    calib = parse_calibration(cfg)
    kwargs = {}
    if calib is not None:
        kwargs = {"gamma_target": calib["gamma_target"],
                  "omega1_range": calib["omega1_range"],
                  "calibration_points": calib["calibration_points"]}

    with Stopwatch() as clock:
        table = run_sweep(
            params, axis, values,
            r_grid_points=sec.integer("profile_points", 240),
            threads=args.threads, **kwargs,
        )

    outdir = _resolve_outdir(args, "sweep")
    manifest = RunManifest(command="sweep", config=cfg)
    header = [f"{axis}_mhz", "omega1_mhz", "u_c_khz", "u_ip_khz", "u_op_khz",
              "u_well_khz", "r_c_um", "r_ip_um", "r_op_um", "r_well_um",
              "r_ic_um", "r_oc_um", "gamma_max_hz", "error"]
    rows = []
    for row in table.rows:
        f = row.features
        rows.append((
            mhz(row.axis_value),
            mhz(row.omega1) if row.omega1 is not None else None,
            khz(f.u_c) if f else None,
            khz(f.u_ip) if f and f.u_ip is not None else None,
            khz(f.u_op) if f and f.u_op is not None else None,
            khz(f.u_well) if f and f.u_well is not None else None,
            f.r_c if f else None, f.r_ip if f else None, f.r_op if f else None,
            f.r_well if f else None, f.r_ic if f else None, f.r_oc if f else None,
            hz(row.gamma_max) if row.gamma_max is not None else None,
            row.error,
        ))
    csv = write_csv(outdir / "sweep.csv", header, rows)
    meta = write_json(outdir / "sweep.json", {
        "axis": axis,
        "values_mhz": values_mhz,
        "template_params": _params_echo(params),
        "gamma_target_hz": hz(calib["gamma_target"]) if calib else None,
        "failed_rows": sum(1 for r in table.rows if r.error),
    })
    plot = _write_plot_script(outdir, "plot_sweep.py", PLOT_SWEEP)
    manifest.wall_clock_s = clock.elapsed
    for p in (csv, meta, plot):
        manifest.add_output(p)
    manifest.save(outdir)
    print(f"sweep over {axis}: {len(rows)} rows -> {outdir}")
    return EXIT_OK


def _build_radial_kernel(cfg: dict, half_extent: float | None, threads: int) -> tuple[RadialKernel, dict]:
    sec = Section(cfg.get("kernel"), "kernel")
    source = sec.text("source", required=True, choices={"synthetic", "profile"})
    if source == "synthetic":
        kern = parse_synthetic_kernel(sec)
        if half_extent is not None and kern.r_max > half_extent * (1 + 1e-9):
            kern = kern.windowed(half_extent)
        return kern, {"kernel": kern.provenance}
    check_known(sec, {"source", "table_points", "r_max_um", "profile_points"})
    params = parse_dressing(cfg)
    params, calib_info = _maybe_calibrate(params, cfg)
    pts = sec.integer("profile_points", 240)
    grid = default_r_grid(params, pts)
    r_max = sec.number("r_max_um")
    if half_extent is not None:
        r_max = half_extent if r_max is None else min(r_max, half_extent)
    if r_max is not None and grid[-1] < r_max:
        grid = np.geomspace(grid[0], r_max, pts)
    prof = interaction_profile(params, grid, threads=threads)
    kern = RadialKernel.from_profile(prof, r_max=r_max)
    return kern, {"kernel": "profile", "params": _params_echo(params), **calib_info}


def _initial_field(cfg: dict, grid: Grid, n_atoms: float, hbar_over_m: float, seed) -> Field:
    sec = Section(cfg.get("initial"), "initial")
    kind = sec.text("type", required=True,
                    choices={"two_soliton", "uniform", "gaussian", "file"})
    if kind == "two_soliton":
        check_known(sec, {"type", "amp_right", "amp_left", "sigma_right_um", "sigma_left_um",
                          "x0_um", "v_right_um_per_us", "v_left_um_per_us",
                          "phi_right_rad", "phi_left_rad"})
        return initial_two_soliton(
            grid,
            amp_right=sec.number("amp_right", 1.0),
            amp_left=sec.number("amp_left", 1.0),
            sigma_right=sec.number("sigma_right_um", required=True),
            sigma_left=sec.number("sigma_left_um", required=True),
            x0=sec.number("x0_um", required=True),
            v_right=sec.number("v_right_um_per_us", 0.0),
            v_left=sec.number("v_left_um_per_us", 0.0),
            phi_right=sec.number("phi_right_rad", 0.0),
            phi_left=sec.number("phi_left_rad", 0.0),
            n_atoms=n_atoms,
            hbar_over_m=hbar_over_m,
        )
    if kind == "uniform":
        check_known(sec, {"type", "noise"})
        return uniform_field(grid, n_atoms, noise=sec.number("noise", 0.0), seed=seed)
    if kind == "gaussian":
        check_known(sec, {"type", "sigma_um"})
        sig = sec.number("sigma_um", required=True)
        mesh = grid.mesh()
        r2 = sum(x**2 for x in mesh)
        psi = np.exp(-r2 / (4.0 * sig * sig)).astype(complex)
        return Field(grid, psi, n_atoms).normalized()
    check_known(sec, {"type", "path"})
    path = sec.text("path", required=True)
    psi = np.load(path)
    return Field(grid, psi, n_atoms)


PLOT_EVOLUTION = """\
import glob
import json
import numpy as np
import matplotlib.pyplot as plt

traj = np.genfromtxt("trajectory.csv", delimiter=",", names=True)
files = sorted(glob.glob("density_*.npy"))
if files:
    dens = np.stack([np.load(f) for f in files])
    meta = json.load(open(files[0].replace(".npy", ".json")))
    if dens.ndim == 2:  # 1D run: space-time heat map
        extent = [-0.5 * dens.shape[1] * meta["spacing_um"][0],
                  0.5 * dens.shape[1] * meta["spacing_um"][0],
                  traj["t_us"][0], traj["t_us"][-1]]
        plt.figure(figsize=(5, 6))
        plt.imshow(dens, origin="lower", aspect="auto",
                   extent=extent, cmap="magma")
        plt.xlabel("x (um)")
        plt.ylabel("t (us)")
        plt.colorbar(label="|psi|^2")
    else:
        plt.figure(figsize=(5, 5))
        plt.imshow(dens[-1].T, origin="lower", cmap="magma")
        plt.colorbar(label="|psi|^2")
    plt.tight_layout()
    plt.savefig("evolution.png", dpi=160)
plt.figure(figsize=(6, 3))
plt.plot(traj["t_us"], traj["e_total"], label="E_total")
plt.xlabel("t (us)")
plt.ylabel("E (rad/us)")
plt.legend()
plt.tight_layout()
plt.savefig("energies.png", dpi=160)
"""


def cmd_gpe_evolve(args) -> int:
    cfg = load_config(args.config)
    run_sec = Section(cfg.get("run"), "run")
    seed = run_sec.integer("seed", 0)
    grid = parse_grid(cfg)
    g = parse_contact(cfg, grid.dims)
    hbar_over_m = parse_hbar_over_m(cfg)
    trap = parse_trap(cfg)
    sec = Section(cfg.get("gpe"), "gpe")
    check_known(sec, {"n_atoms", "contact", "g_value", "l_z_um", "hbar_over_m_um2_per_us",
                      "dt_us", "steps", "record_every", "snapshot_every",
                      "checkpoint_every", "resume_from", "use_kernel"})
    n_atoms = sec.number("n_atoms", required=True)
    dt = sec.number("dt_us", required=True)
    steps = sec.integer("steps", required=True)
    record_every = sec.integer("record_every", max(1, steps // 200))
    snapshot_every = sec.integer("snapshot_every", 0)
    checkpoint_every = sec.integer("checkpoint_every", 0)
    use_kernel = sec.flag("use_kernel", True)

    kernel = None
    kernel_info = {}
    if use_kernel:
        radial, kernel_info = _build_radial_kernel(cfg, min(grid.extent) / 2.0, args.threads)
        kernel = tabulate_kernel(radial, grid)

    if snapshot_every > 0 and snapshot_every % record_every != 0:
        raise ConfigError("gpe.snapshot_every: must be a multiple of record_every")

    resume_from = sec.text("resume_from")
    step0 = 0
    if resume_from:
        ck = np.load(resume_from)
        fld = Field(grid, ck["psi"], n_atoms)
        step0 = int(ck["step"])
    else:
        fld = _initial_field(cfg, grid, n_atoms, hbar_over_m, seed)

    outdir = _resolve_outdir(args, "gpe-evolve")
    manifest = RunManifest(command="gpe-evolve", config=cfg, seeds={"run": seed})
    outputs = []

    if steps - step0 <= 0:
        raise ConfigError("gpe.steps: nothing to do (steps <= resume step)")

    with Stopwatch() as clock:
        segment = checkpoint_every if checkpoint_every > 0 else steps - step0
        rows = []
        current = fld
        done = step0
        while done < steps:
            n_seg = min(segment, steps - done)
            traj = evolve_real(current, kernel, g, trap, dt, n_seg, hbar_over_m,
                               record_every=record_every,
                               keep_snapshots=snapshot_every > 0,
                               check_stability=done == step0)
            for i, (t, norm, en) in enumerate(zip(traj.times, traj.norms, traj.energies)):
                if i == 0 and done > step0:
                    continue  # segment start duplicates the previous segment's end
                step = done + int(round(t / dt))
                rows.append((step * dt, norm, en["e_kinetic"], en["e_contact"],
                             en["e_nonlocal"], en["e_ext"], en["e_total"]))
                if snapshot_every > 0 and (step % snapshot_every == 0 or step == steps):
                    snap = traj.snapshots[i]
                    outputs.extend(write_field_snapshot(
                        outdir / f"density_{step:07d}.npy", snap.density(), grid.spacing,
                        units="um^-%d" % grid.dims))
            current = traj.final
            done += n_seg
            if checkpoint_every > 0:
                ck_path = outdir / f"checkpoint_{done:07d}.npz"
                np.savez(ck_path, psi=current.psi, step=done, t=done * dt)
                outputs.append(ck_path)
        outputs.insert(0, write_csv(outdir / "trajectory.csv",
                                    ["t_us", "norm", "e_kinetic", "e_contact",
                                     "e_nonlocal", "e_ext", "e_total"], rows))
        np.save(outdir / "final_psi.npy", current.psi)
        outputs.append(outdir / "final_psi.npy")
        traj_final = current

    outputs.append(write_json(outdir / "gpe.json", {
        "grid": {"extent_um": list(grid.extent), "points": list(grid.points)},
        "n_atoms": n_atoms, "g": g, "hbar_over_m": hbar_over_m,
        "dt_us": dt, "steps": steps, "resumed_from_step": step0,
        "final_norm": traj_final.norm(),
        **kernel_info,
    }))
    outputs.append(_write_plot_script(outdir, "plot_evolution.py", PLOT_EVOLUTION))
    manifest.wall_clock_s = clock.elapsed
    for p in outputs:
        manifest.add_output(p)
    manifest.save(outdir)
    print(f"gpe-evolve: {steps - step0} steps -> {outdir}")
    return EXIT_OK


PLOT_GROUND = """\
import json
import numpy as np
import matplotlib.pyplot as plt

dens = np.load("ground_density.npy")
meta = json.load(open("ground_density.json"))
sf = np.genfromtxt("structure_factor.csv", delimiter=",", names=True)
fig, axes = plt.subplots(1, 2, figsize=(9, 4))
if dens.ndim == 2:
    half = [0.5 * n * d for n, d in zip(dens.shape, meta["spacing_um"])]
    axes[0].imshow(dens.T, origin="lower", cmap="magma",
                   extent=[-half[0], half[0], -half[1], half[1]])
    axes[0].set_xlabel("x (um)")
    axes[0].set_ylabel("y (um)")
else:
    x = (np.arange(dens.shape[0]) - dens.shape[0] // 2) * meta["spacing_um"][0]
    axes[0].plot(x, dens)
    axes[0].set_xlabel("x (um)")
    axes[0].set_ylabel("|psi|^2")
axes[1].plot(sf["k_per_um"], sf["s_of_k"])
axes[1].set_xlabel("k (1/um)")
axes[1].set_ylabel("S(k) (radial average)")
fig.tight_layout()
fig.savefig("ground.png", dpi=160)
"""


def cmd_gpe_ground(args) -> int:
    cfg = load_config(args.config)
    run_sec = Section(cfg.get("run"), "run")
    seed = run_sec.integer("seed", 0)
    grid = parse_grid(cfg)
    g = parse_contact(cfg, grid.dims)
    hbar_over_m = parse_hbar_over_m(cfg)
    trap = parse_trap(cfg)
    gsec = Section(cfg.get("gpe"), "gpe")
    n_atoms = gsec.number("n_atoms", required=True)
    sec = Section(cfg.get("ground"), "ground")
    check_known(sec, {"dt_us", "max_steps", "renormalize_every", "energy_tol", "noise"})
    dt = sec.number("dt_us", required=True)
    max_steps = sec.integer("max_steps", 20000)
    renorm = sec.integer("renormalize_every", 10)
    tol = sec.number("energy_tol", 1e-9)
    noise = sec.number("noise", 0.01)

    radial, kernel_info = _build_radial_kernel(cfg, min(grid.extent) / 2.0, args.threads)
    kernel = tabulate_kernel(radial, grid)
    init = _initial_field(cfg, grid, n_atoms, hbar_over_m, seed) if "initial" in cfg \
        else uniform_field(grid, n_atoms, noise=noise, seed=seed)

    outdir = _resolve_outdir(args, "gpe-ground")
    manifest = RunManifest(command="gpe-ground", config=cfg, seeds={"run": seed})
    with Stopwatch() as clock:
        ground, info = evolve_imaginary(init, kernel, g, trap, dt, max_steps, hbar_over_m,
                                        renormalize_every=renorm, energy_tol=tol)
        obs = observables(ground, kernel, g, trap, hbar_over_m)
        k_bins, s_k = radial_structure_factor(ground)

    outputs = [outdir / "ground_psi.npy"]
    np.save(outputs[0], ground.psi)
    outputs.extend(write_field_snapshot(outdir / "ground_density.npy", ground.density(),
                                        grid.spacing, units="um^-%d" % grid.dims))
    outputs.append(write_csv(outdir / "structure_factor.csv", ["k_per_um", "s_of_k"],
                             list(zip(k_bins, s_k))))
    outputs.append(write_json(outdir / "ground.json", {
        "converged": info["converged"],
        "steps": info["steps"],
        "energies": obs,
        "grid": {"extent_um": list(grid.extent), "points": list(grid.points)},
        "seed": seed,
        **kernel_info,
    }))
    outputs.append(_write_plot_script(outdir, "plot_ground.py", PLOT_GROUND))
    manifest.wall_clock_s = clock.elapsed
    for p in outputs:
        manifest.add_output(p)
    manifest.save(outdir)
    status = "converged" if info["converged"] else "NOT converged (partial result)"
    print(f"gpe-ground: {info['steps']} steps, {status} -> {outdir}")
    return EXIT_OK


PLOT_SPECTRUM = """\
import json
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("spectrum.csv", delimiter=",", names=True)
rotons = json.load(open("rotons.json"))
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["k_per_um"], data["re_omega_rad_per_us"], "b-", label="Re omega")
ax.plot(data["k_per_um"], data["im_omega_rad_per_us"], "r-", label="Im omega (growth)")
for band in rotons["bands"]:
    ax.axvspan(band["k_lo"], band["k_hi"], alpha=0.15, color="red")
ax.set_xlabel("k (1/um)")
ax.set_ylabel("omega (rad/us)")
ax.legend()
fig.tight_layout()
fig.savefig("spectrum.png", dpi=160)
"""


def cmd_bogoliubov(args) -> int:
    cfg = load_config(args.config)
    sec = Section(cfg.get("bogoliubov"), "bogoliubov")
    check_known(sec, {"dims", "rho", "k_max_per_um", "k_points"})
    dims = sec.integer("dims", required=True)
    if dims not in (1, 2, 3):
        raise ConfigError("bogoliubov.dims: must be 1, 2 or 3")
    rho = sec.number("rho", required=True)
    k_max = sec.number("k_max_per_um", required=True)
    k_points = sec.integer("k_points", 800)
    g = parse_contact(cfg, dims)
    hbar_over_m = parse_hbar_over_m(cfg)
    radial, kernel_info = _build_radial_kernel(cfg, None, args.threads)

    with Stopwatch() as clock:
        k_grid = np.linspace(0.0, k_max, k_points)
        spec = spectrum(radial, rho, g, hbar_over_m, k_grid, dims)
        bands = roton_instabilities(spec)

    outdir = _resolve_outdir(args, "bogoliubov")
    manifest = RunManifest(command="bogoliubov", config=cfg)
    outputs = [
        write_csv(outdir / "spectrum.csv",
                  ["k_per_um", "re_omega_rad_per_us", "im_omega_rad_per_us"],
                  [(k, om.real, om.imag) for k, om in zip(spec.k_grid, spec.omega)]),
        write_json(outdir / "rotons.json", {
            "rho": rho, "dims": dims, "g": g,
            "bands": [{"k_lo": b.k_lo, "k_hi": b.k_hi, "k_roton": b.k_roton,
                       "beta_rad_per_us": b.beta, "lattice_a_um": b.lattice_a}
                      for b in bands],
            **kernel_info,
        }),
        _write_plot_script(outdir, "plot_spectrum.py", PLOT_SPECTRUM),
    ]
    manifest.wall_clock_s = clock.elapsed
    for p in outputs:
        manifest.add_output(p)
    manifest.save(outdir)
    print(f"bogoliubov: {len(bands)} unstable band(s) -> {outdir}")
    return EXIT_OK


PLOT_STABILITY = """\
import numpy as np
import matplotlib.pyplot as plt

fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
single = np.genfromtxt("landscape_single.csv", delimiter=",", names=True)
axes[0].errorbar(single["sigma_um"], single["e_total"], yerr=single["e_dress_stderr"])
axes[0].set_xlabel("sigma (um)")
axes[0].set_ylabel("E_total (rad/us)")
mol = np.genfromtxt("landscape_molecule.csv", delimiter=",", names=True)
axes[1].errorbar(mol["d_um"], mol["e_total"], yerr=mol["e_dress_stderr"])
axes[1].set_xlabel("D (um)")
axes[1].set_ylabel("E_total (rad/us)")
win = np.genfromtxt("window.csv", delimiter=",", names=True)
ok = np.isfinite(win["n_min"])
axes[2].loglog(win["gamma_hz"][ok], win["n_min"][ok], "^-", label="N_min")
ok = np.isfinite(win["n_max"])
axes[2].loglog(win["gamma_hz"][ok], win["n_max"][ok], "v-", label="N_max")
axes[2].set_xlabel("Gamma (Hz)")
axes[2].set_ylabel("N")
axes[2].legend()
fig.tight_layout()
fig.savefig("stability.png", dpi=160)
"""


def cmd_stability(args) -> int:
    cfg = load_config(args.config)
    run_sec = Section(cfg.get("run"), "run")
    seed = run_sec.integer("seed", 0)
    sec = Section(cfg.get("stability"), "stability")
    check_known(sec, {"sigma_um", "gammas_hz", "trials", "samples", "d_max_um",
                      "d_points", "sigma_scan_min_um", "sigma_scan_max_um",
                      "sigma_scan_points", "landscape_gamma_hz", "single_n",
                      "molecule_n", "gamma_ref_hz", "contact_g"})
    sigma = sec.number("sigma_um", required=True)
    gammas_hz = sec.numbers("gammas_hz", required=True)
    trials = sec.integer("trials", 100)
    samples = sec.integer("samples", 200_000)
    g = sec.number("contact_g", 0.0)
    hbar_over_m = parse_hbar_over_m(cfg)

    kernel_sec = Section(cfg.get("kernel"), "kernel")
    source = kernel_sec.text("source", required=True, choices={"synthetic", "profile"})

    def gamma_rad(g_hz: float) -> float:
        return rad_per_us(g_hz * 1e-6)

    with Stopwatch() as clock:
        entries = []
        kernel_info = {}
        if source == "synthetic":
            base, kernel_info = _build_radial_kernel(cfg, None, args.threads)
            gamma_ref = sec.number("gamma_ref_hz", gammas_hz[0])
            for g_hz in gammas_hz:
                scale = g_hz / gamma_ref
                entries.append((gamma_rad(g_hz),
                                RadialKernel(base.r_table, base.u_table * scale,
                                             provenance=base.provenance + f"*{scale:.4g}")))
        else:
            params = parse_dressing(cfg)
            calib = parse_calibration(cfg) or {}
            for g_hz in gammas_hz:
                om1 = calibrate_omega1(
                    params, gamma_rad(g_hz),
                    omega1_range=calib.get("omega1_range"),
                    calibration_points=calib.get("calibration_points", 48))
                p = params.with_(omega1=om1)
                prof = interaction_profile(p, default_r_grid(p, 240), threads=args.threads)
                entries.append((gamma_rad(g_hz), RadialKernel.from_profile(prof)))
            kernel_info = {"kernel": "profile family", "params": _params_echo(params)}

        d_max = sec.number("d_max_um", entries[0][1].r_max)
        d_points = sec.integer("d_points", 160)
        d_values = np.linspace(0.0, d_max, d_points)
        scan_kwargs = {}
        if sec.number("sigma_scan_min_um") is not None:
            scan_kwargs["sigma_scan"] = np.geomspace(
                sec.number("sigma_scan_min_um"), sec.number("sigma_scan_max_um", required=True),
                sec.integer("sigma_scan_points", 28))
        reports = stability_window(entries, sigma, g, hbar_over_m,
                                   d_values=d_values, samples=samples, seed=seed,
                                   **scan_kwargs)

        # landscape companions at one representative loss rate
        land_gamma_hz = sec.number("landscape_gamma_hz", gammas_hz[0])
        idx = int(np.argmin([abs(gh - land_gamma_hz) for gh in gammas_hz]))
        land_kernel = entries[idx][1]
        single_n = sec.integer("single_n", 20)
        molecule_n = sec.integer("molecule_n", 40)
        sig_values = np.geomspace(0.3 * sigma, 6.0 * sigma, 20)
        single = soliton_energy_landscape(single_n, sig_values, land_kernel, g,
                                          hbar_over_m, trials=trials, seed=seed)
        molecule = molecule_energy_landscape(molecule_n, sigma,
                                             np.linspace(0.0, d_max, 40), land_kernel, g,
                                             hbar_over_m, trials=trials, seed=seed)

    outdir = _resolve_outdir(args, "stability")
    manifest = RunManifest(command="stability", config=cfg, seeds={"run": seed})
    outputs = [
        write_csv(outdir / "window.csv",
                  ["gamma_hz", "n_min", "n_max", "omega_mol_rad_per_us", "t2_us",
                   "u_mol_rad_per_us", "sigma_osc_um", "viable", "note"],
                  [(hz(r.gamma), r.n_min, r.n_max, r.omega_mol, r.t2, r.u_mol,
                    r.sigma_osc, r.viable, r.note) for r in reports]),
        write_json(outdir / "window.json", {
            "sigma_um": sigma,
            "rows": [{
                "gamma_hz": hz(r.gamma), "n_min": r.n_min, "n_max": r.n_max,
                "n_max_exact": r.n_max_exact, "omega_mol_rad_per_us": r.omega_mol,
                "t2_us": r.t2, "u_mol_rad_per_us": r.u_mol,
                "sigma_osc_um": r.sigma_osc, "viable": r.viable, "note": r.note,
            } for r in reports],
            **kernel_info,
        }),
        write_csv(outdir / "landscape_single.csv",
                  ["sigma_um", "e_kinetic", "e_contact", "e_dress_mean",
                   "e_dress_stderr", "e_total"],
                  [(p.x, p.e_kinetic, p.e_contact, p.e_dress_mean, p.e_dress_stderr,
                    p.e_total) for p in single]),
        write_csv(outdir / "landscape_molecule.csv",
                  ["d_um", "e_kinetic", "e_contact", "e_dress_mean",
                   "e_dress_stderr", "e_total"],
                  [(p.x, p.e_kinetic, p.e_contact, p.e_dress_mean, p.e_dress_stderr,
                    p.e_total) for p in molecule]),
        _write_plot_script(outdir, "plot_stability.py", PLOT_STABILITY),
    ]
    manifest.wall_clock_s = clock.elapsed
    for p in outputs:
        manifest.add_output(p)
    manifest.save(outdir)
    print(f"stability: {len(reports)} rows -> {outdir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    target = Path(args.config)
    manifest = target if target.is_file() else target / "manifest.json"
    if not manifest.exists():
        print(f"no manifest found at {manifest}", file=sys.stderr)
        return EXIT_CONFIG
    problems = verify_manifest(manifest)
    if problems:
        for p in problems:
            print(f"verify: {p}", file=sys.stderr)
        return 1
    print(f"verify: {len(RunManifest.load(manifest).outputs)} outputs ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydress",
        description="Noisy Rydberg dressing: pair interactions and condensate simulations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "profile": cmd_profile,
        "sweep": cmd_sweep,
        "gpe-evolve": cmd_gpe_evolve,
        "gpe-ground": cmd_gpe_ground,
        "bogoliubov": cmd_bogoliubov,
        "stability": cmd_stability,
        "verify": cmd_verify,
    }
    for name, func in commands.items():
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("config", help="run directory or manifest.json path")
        else:
            p.add_argument("config", help="TOML config file")
            p.add_argument("output_dir", nargs="?", default=None,
                           help=f"output directory (default from ${OUTPUT_ROOT_ENV} or cwd)")
            p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationRangeError as exc:
        print(f"calibration unreachable: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (DegenerateSteadyStateError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
