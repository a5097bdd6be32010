//! Built-in experiment presets.
//!
//! Each preset is a complete configuration text (the same format `run`
//! accepts from a file), so `describe` echoes exactly what `run` executes.
//! Tolerances are pinned here and echoed into every manifest.

/// A named, ready-to-run configuration.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: &'static str,
}

/// All presets, sorted by name.
pub fn all() -> &'static [Preset] {
    PRESETS
}

/// Looks up a preset by name.
pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "free-oracle",
        summary: "Spectral propagator vs. the closed-form free Gaussian at t = 1",
        config: "\
[experiment]
name = free-oracle
dimension = 1
seed = 0

[grid]
points = 512
half_width = 20

[solver]
lambda = 0
dt = 1e-3

[params]
amplitude = 0.8
concentration = 1.0
t_end = 1.0
tol_rel_l2 = 1e-8

[output]
dir = out/free-oracle
",
    },
    Preset {
        name: "gaussian-weighted-law",
        summary: "Weighted-norm scaling law |x|^s of spreading Gaussians vs. quadrature constant",
        config: "\
[experiment]
name = gaussian-weighted-law
dimension = 1
seed = 0

[grid]
points = 65536
half_width = 60

[solver]
lambda = 0
dt = 1e-3

[params]
amplitude = 0.7
a_values = 0.5, 0.5, 0.5, 1, 1, 1, 2, 2, 2
t_values = 0.5, 1, 2, 0.5, 1, 2, 0.5, 1, 2
s_values = 0.5, 0.8, 1.0, 0.8, 1.0, 0.5, 1.0, 0.5, 0.8
tol_rel = 1e-6

[output]
dir = out/gaussian-weighted-law
",
    },
    Preset {
        name: "growth-bounds",
        summary: "Weighted-norm growth and propagation ratios stay below a factor of two",
        config: "\
[experiment]
name = growth-bounds
dimension = 1
seed = 0

[grid]
points = 1024
half_width = 15

[solver]
lambda = 1
dt = 2e-3

[params]
amplitude = 0.3
concentration = 1.0
perturb_amplitude = 0.02
perturb_concentration = 2.0
s = 0.5
t_end = 1.0
t_mid = 0.5
ratio_bound = 2.0

[output]
dir = out/growth-bounds
",
    },
    Preset {
        name: "illposed-linear-table",
        summary: "Gridless weighted-norm table of free cascades, divergent in the term count",
        config: "\
[experiment]
name = illposed-linear-table
dimension = 1
seed = 0

[grid]
points = 512
half_width = 20

[solver]
lambda = 0
dt = 1e-3

[params]
k_max = 4
s = 0.5
growth_start = 2.0
a1 = 1.0
times = 0.5, 1, 2, 4

[output]
dir = out/illposed-linear-table
",
    },
    Preset {
        name: "illposed-nls-demo",
        summary: "Concentrated-Gaussian family: inputs shrink while outputs grow in weighted norm",
        config: "\
[experiment]
name = illposed-nls-demo
dimension = 1
seed = 0

[grid]
points = 512
half_width = 20

[solver]
lambda = 1
dt = 2e-3

[params]
k_values = 1, 2, 3, 4
s = 0.5
t_probe = 1.0

[output]
dir = out/illposed-nls-demo
",
    },
    Preset {
        name: "interp-bounds",
        summary: "Interpolation norms: product bound and equivalence with the fractional weight",
        config: "\
[experiment]
name = interp-bounds
dimension = 1
seed = 11

[grid]
points = 512
half_width = 16

[solver]
lambda = 0
dt = 1e-3

[params]
trials = 20
s = 0.5
bound_factor = 1.05
equiv_lo = 0.25
equiv_hi = 4.0
refine_drift = 0.05

[output]
dir = out/interp-bounds
",
    },
    Preset {
        name: "mass-conservation",
        summary: "Two-dimensional defocusing run holding L\u{b2} mass for ten thousand steps",
        config: "\
[experiment]
name = mass-conservation
dimension = 2
seed = 0

[grid]
points = 256
half_width = 10

[solver]
lambda = 1
dt = 1e-3

[params]
amplitude = 0.5
concentration = 1.0
steps = 10000
tol_drift = 1e-10

[output]
dir = out/mass-conservation
",
    },
    Preset {
        name: "pc-involution",
        summary: "Time-inversion transform: L\u{b2} isometry and involution-with-reflection",
        config: "\
[experiment]
name = pc-involution
dimension = 1
seed = 42

[grid]
points = 512
half_width = 12

[solver]
lambda = 0
dt = 1e-3

[params]
trials = 100
times = 0.5, 1, 2
tol_isometry = 1e-10
tol_involution = 1e-9

[output]
dir = out/pc-involution
",
    },
    Preset {
        name: "pc-solution-map",
        summary: "Transformed solutions solve the equation again; wrong chirp sign fails loudly",
        config: "\
[experiment]
name = pc-solution-map
dimension = 1
seed = 0

[grid]
points = 2048
half_width = 32

[solver]
lambda = 1
dt = 1e-3

[params]
amplitude = 0.3
concentration = 0.5
t1 = 1.0
free_t2 = 1.5
free_points = 33
nls_t2 = 1.5
nls_stride = 16
tol_free = 1e-6
tol_nls = 1e-3
control_factor = 10.0

[output]
dir = out/pc-solution-map
",
    },
    Preset {
        name: "pc-spacetime-isometry",
        summary: "Balanced-pair slab norm matches across the time-inversion transform",
        config: "\
[experiment]
name = pc-spacetime-isometry
dimension = 1
seed = 0

[grid]
points = 2048
half_width = 32

[solver]
lambda = 0
dt = 1e-3

[params]
amplitude = 1.0
concentration = 0.5
t1 = 1.0
t2 = 2.0
snapshots = 64
tol_rel = 0.01
refine_factor = 0.6

[output]
dir = out/pc-spacetime-isometry
",
    },
    Preset {
        name: "pipeline-tindependence",
        summary: "Composed evolve-transform-evolve map is independent of the handoff time",
        config: "\
[experiment]
name = pipeline-tindependence
dimension = 1
seed = 0

[grid]
points = 2048
half_width = 15

[solver]
lambda = 1
dt = 2e-3

[params]
amplitude = 0.3
concentration = 1.0
t_mids = 0.5, 0.75, 1.0
t_lwp = 1.0
s = 0.5
tol_spread = 1e-3

[output]
dir = out/pipeline-tindependence
",
    },
    Preset {
        name: "regularized-limit",
        summary: "Frequency-truncated data: composed-map outputs form a Cauchy family",
        config: "\
[experiment]
name = regularized-limit
dimension = 1
seed = 0

[grid]
points = 2048
half_width = 20

[solver]
lambda = 1
dt = 4e-3

[params]
amplitude = 0.3
s = 0.5
cutoffs = 8, 16, 32, 64
t_mid = 0.5
t_lwp = 1.0

[output]
dir = out/regularized-limit
",
    },
    Preset {
        name: "scattering-ladder",
        summary: "Inverted-time profiles converge and reproduce the scattering state",
        config: "\
[experiment]
name = scattering-ladder
dimension = 1
seed = 0

[grid]
points = 8192
half_width = 100

[solver]
lambda = 1
dt = 1e-3

[params]
amplitude = 0.3
concentration = 1.0
horizons = 2, 4, 8
s = 0.5
tol_residual = 1e-2

[output]
dir = out/scattering-ladder
",
    },
    Preset {
        name: "splitting-order-2d",
        summary: "Energy-drift refinement ratio near 4 for the two-dimensional defocusing run",
        config: "\
[experiment]
name = splitting-order
dimension = 2
seed = 0

[grid]
points = 64
half_width = 8

[solver]
lambda = 1
dt = 0.02

[params]
amplitude = 0.5
concentration = 1.0
t_end = 0.5
ratio_lo = 3.0
ratio_hi = 5.0

[output]
dir = out/splitting-order-2d
",
    },
    Preset {
        name: "splitting-order-defocusing",
        summary: "Energy-drift refinement ratio near 4 for the defocusing line run",
        config: "\
[experiment]
name = splitting-order
dimension = 1
seed = 0

[grid]
points = 1024
half_width = 40

[solver]
lambda = 1
dt = 0.02

[params]
amplitude = 0.5
concentration = 1.0
t_end = 0.5
ratio_lo = 3.0
ratio_hi = 5.0

[output]
dir = out/splitting-order-defocusing
",
    },
    Preset {
        name: "splitting-order-focusing",
        summary: "Energy-drift refinement ratio near 4 for a small focusing run",
        config: "\
[experiment]
name = splitting-order
dimension = 1
seed = 0

[grid]
points = 1024
half_width = 40

[solver]
lambda = -0.5
dt = 0.02

[params]
amplitude = 0.4
concentration = 1.0
t_end = 0.5
ratio_lo = 3.0
ratio_hi = 5.0

[output]
dir = out/splitting-order-focusing
",
    },
    Preset {
        name: "transform-regularity-ratio",
        summary: "Bounded transform-regularity ratio on a Gaussian family, grid-refinement stable",
        config: "\
[experiment]
name = transform-regularity-ratio
dimension = 1
seed = 0

[grid]
points = 8192
half_width = 32

[solver]
lambda = 0
dt = 1e-3

[params]
amplitude = 1.0
concentrations = 0.25, 0.5, 1, 2, 4
times = 0.3, 0.5, 1.0
s = 0.5
q_bound = 5.0
refine_drift = 0.05

[output]
dir = out/transform-regularity-ratio
",
    },
    Preset {
        name: "virial-constancy",
        summary: "Transformed-flow energy is constant and proportional to the data's x-moment",
        config: "\
[experiment]
name = virial-constancy
dimension = 1
seed = 0

[grid]
points = 2048
half_width = 32

[solver]
lambda = 1
dt = 1e-3

[params]
amplitudes = 0.15, 0.18, 0.2, 0.22, 0.25
concentrations = 1, 0.5, 2, 1.5, 1
t1 = 1.0
t2 = 2.0
probe_stride = 125
tol_variation = 1e-3
tol_family = 0.01

[output]
dir = out/virial-constancy
",
    },
];
