"""A coarse phase diagram written as CSV and a sigma_z heat map with boundary overlays.

Uses two worker processes; the output is byte-identical to a serial run.
Files land in the current directory. Worker processes are spawned, so the
sweep must sit under a ``__main__`` guard.
"""
from rabiq import Axis, ModelParams, SweepSpec, boundary_curve, run_sweep, write_csv, render_heatmap_svg
from rabiq.report import default_style


def main():
    p = ModelParams(omega=0.01)
    spec = SweepSpec(
        axis1=Axis("g1", 0.0, 2.0 * p.g_s, 31),
        axis2=Axis("g2", -0.9 * p.g_t, 0.9 * p.g_t, 31),
        fixed=p,
        observables=("sigma_z", "sigma_x"),
    )
    d = run_sweep(spec, jobs=2)
    print(f"{len(d.rows)} points, success fraction {d.success_fraction:.3f}")

    write_csv(d, "phase_diagram.csv")
    lowfreq = boundary_curve("LowFreq", p.omega, p.Omega, n=200)
    render_heatmap_svg(d, "sigma_z", default_style("sigma_z", overlay=(lowfreq,)), "phase_diagram_sigma_z.svg")
    print("wrote phase_diagram.csv and phase_diagram_sigma_z.svg")


if __name__ == "__main__":
    main()
