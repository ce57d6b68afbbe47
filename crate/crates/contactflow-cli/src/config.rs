//! Scenario configuration: key=value parsing, named presets, initial data.
//!
//! A scenario file is UTF-8 `key=value` lines (`#` comments and blank lines
//! allowed). Unknown keys are rejected, duplicates are an error, and parse
//! errors carry the line number. Presets are stored in the same format, so
//! `--preset NAME` plus `--override KEY=VAL` and the convenience flags all
//! feed one parser.

use anyhow::{anyhow, bail, Context, Result};
use contactflow::contact::ContactModel;
use contactflow::evolution::{sawtooth_coordinate, EquationKind};
use contactflow::spectral::{snapshot, Grid, ScalarField};
use std::collections::HashSet;
use std::f64::consts::TAU;
use std::path::PathBuf;

pub const REQUIRED_KEYS: &[&str] = &["equation", "grid", "t_end"];

pub const KNOWN_KEYS: &[&str] = &[
    "equation",
    "grid",
    "lengths",
    "t_end",
    "dt",
    "cadence",
    "out",
    "seed",
    "initial",
    "alpha",
    "beta",
    "amplitude",
    "particles",
    "cfl_limit",
    "blowup_threshold",
    "dealias",
];

/// Fully resolved scenario parameters.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub equation: String,
    pub grid_dims: Vec<usize>,
    pub lengths: Option<Vec<f64>>,
    pub t_end: f64,
    pub dt: f64,
    pub cadence: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub initial: String,
    pub alpha: f64,
    pub beta: f64,
    pub amplitude: f64,
    /// Lattice particles per axis (0 disables the flow map).
    pub particles: usize,
    pub cfl_limit: f64,
    pub blowup_threshold: f64,
    pub dealias: bool,
}

/// Parse `key=value` lines, preserving order, rejecting duplicates.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {lineno}: expected key=value, got {raw:?}"))?;
        let key = k.trim().to_string();
        let value = v.trim().to_string();
        if key.is_empty() {
            bail!("line {lineno}: empty key");
        }
        if !seen.insert(key.clone()) {
            bail!("line {lineno}: duplicate key `{key}`");
        }
        out.push((key, value));
    }
    Ok(out)
}

/// Apply overrides on top of base pairs (replace or append).
pub fn apply_overrides(
    mut pairs: Vec<(String, String)>,
    overrides: &[(String, String)],
) -> Vec<(String, String)> {
    for (k, v) in overrides {
        if let Some(slot) = pairs.iter_mut().find(|(pk, _)| pk == k) {
            slot.1 = v.clone();
        } else {
            pairs.push((k.clone(), v.clone()));
        }
    }
    pairs
}

fn parse_list<T: std::str::FromStr>(value: &str, what: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| anyhow!("invalid {what} entry {s:?}"))
        })
        .collect()
}

impl ScenarioConfig {
    /// Validate keys and build the full configuration with defaults applied.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        for (k, _) in pairs {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                bail!("unknown key `{k}` (known keys: {})", KNOWN_KEYS.join(", "));
            }
        }
        let missing: Vec<&str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|k| !pairs.iter().any(|(pk, _)| pk == k))
            .collect();
        if !missing.is_empty() {
            bail!("missing required keys: {}", missing.join(", "));
        }

        let get = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let parse_f64 = |key: &str| -> Result<Option<f64>> {
            get(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| anyhow!("invalid {key} value {v:?}"))
                })
                .transpose()
        };

        let equation = get("equation").unwrap().to_string();
        let known_eq = [
            "contact-ea",
            "camassa-holm",
            "quasigeostrophic",
            "beta-plane",
            "reduced-1d",
        ];
        if !known_eq.contains(&equation.as_str()) {
            bail!(
                "unknown equation `{equation}` (one of: {})",
                known_eq.join(", ")
            );
        }

        let grid_dims: Vec<usize> = parse_list(get("grid").unwrap(), "grid")?;
        let lengths = get("lengths")
            .map(|v| parse_list::<f64>(v, "lengths"))
            .transpose()?;
        let t_end = parse_f64("t_end")?.unwrap();
        if !(t_end.is_finite() && t_end >= 0.0) {
            bail!("t_end must be nonnegative, got {t_end}");
        }
        let dt = parse_f64("dt")?.unwrap_or(0.01);
        let cadence = get("cadence")
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| anyhow!("invalid cadence {v:?}"))
            })
            .transpose()?
            .unwrap_or(10);
        if cadence == 0 {
            bail!("cadence must be >= 1");
        }
        let seed = get("seed")
            .map(|v| v.parse::<u64>().map_err(|_| anyhow!("invalid seed {v:?}")))
            .transpose()?
            .unwrap_or(0);
        let particles = get("particles")
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| anyhow!("invalid particles {v:?}"))
            })
            .transpose()?
            .unwrap_or(0);
        let dealias = get("dealias")
            .map(|v| match v {
                "true" | "1" => Ok(true),
                "false" | "0" => Ok(false),
                other => Err(anyhow!("invalid dealias value {other:?}")),
            })
            .transpose()?
            .unwrap_or(true);

        let default_initial = match equation.as_str() {
            "reduced-1d" => "phi-bump",
            _ => "random-trig",
        };

        Ok(Self {
            initial: get("initial").unwrap_or(default_initial).to_string(),
            out: get("out").map(PathBuf::from),
            alpha: parse_f64("alpha")?.unwrap_or(1.0),
            beta: parse_f64("beta")?.unwrap_or(1.0),
            amplitude: parse_f64("amplitude")?.unwrap_or(1.0),
            cfl_limit: parse_f64("cfl_limit")?.unwrap_or(0.4),
            blowup_threshold: parse_f64("blowup_threshold")?.unwrap_or(1e6),
            equation,
            grid_dims,
            lengths,
            t_end,
            dt,
            cadence,
            seed,
            particles,
            dealias,
        })
    }
}

/// A buildable scenario: equation plus initial state variable.
#[derive(Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub eq: EquationKind,
    pub m0: ScalarField,
}

/// Construct grid, model, equation and initial data from a configuration.
pub fn build_scenario(config: ScenarioConfig) -> Result<Scenario> {
    let default_lengths = match config.equation.as_str() {
        "reduced-1d" => vec![40.0; config.grid_dims.len()],
        _ => vec![TAU; config.grid_dims.len()],
    };
    let lengths = config.lengths.clone().unwrap_or(default_lengths);
    let grid = Grid::new(&config.grid_dims, &lengths).context("building grid")?;

    let eq = match config.equation.as_str() {
        "contact-ea" => {
            let model = match grid.ndim() {
                1 => ContactModel::circle(grid.clone())?,
                3 => ContactModel::torus3(grid.clone())?,
                d => bail!("contact-ea needs a 1-D or 3-D grid, got {d} axes"),
            };
            EquationKind::contact_ea(model)?
        }
        "camassa-holm" => {
            let model = ContactModel::circle(grid.clone()).context("camassa-holm grid")?;
            EquationKind::camassa_holm(model)?
        }
        "quasigeostrophic" => {
            let model =
                ContactModel::quanto_torus2(grid.clone()).context("quasigeostrophic grid")?;
            EquationKind::quasigeostrophic(model, config.alpha)?
        }
        "beta-plane" => {
            let model = ContactModel::quanto_torus2(grid.clone()).context("beta-plane grid")?;
            let psi = sawtooth_coordinate(&grid, 1)?;
            EquationKind::beta_plane(model, config.alpha, config.beta, psi)?
        }
        "reduced-1d" => EquationKind::reduced_1d(grid.clone())?,
        other => bail!("unknown equation `{other}`"),
    };

    let m0 = initial_state(&config, &eq, &grid)?;
    Ok(Scenario { config, eq, m0 })
}

/// Periodic Gaussian bump of unit mass centred mid-box.
fn periodic_gaussian(grid: &Grid, sigma: f64) -> ScalarField {
    let l = grid.length(0);
    let centre = 0.5 * l;
    let raw = ScalarField::from_fn(grid, |x| {
        let mut s = 0.0;
        for k in -3i32..=3 {
            let d = x[0] - centre + k as f64 * l;
            s += (-0.5 * d * d / (sigma * sigma)).exp();
        }
        s
    });
    raw.scaled(1.0 / raw.integral())
}

/// Build the initial state variable (m, ω or φ) for the equation.
///
/// Named profiles:
/// - `cos-z`, `sin-x`, `random-trig`: stream function f₀ for contact kinds
///   (the state is m₀ = f₀ - Δf₀); for quotient kinds the profile is the
///   vorticity ω₀ itself.
/// - `gauss-bump`: 1-D momentum bump of mass `amplitude` (width 0.25).
/// - `phi-bump`: nonnegative reduced momentum φ₀ = amplitude·exp(-y²/4).
/// - `g-negative-even`: even negative profile g₀ = -amplitude·exp(-y²),
///   state φ₀ = g₀ - g₀''.
/// - `snapshot:PATH`: raw state snapshot (grid must match).
fn initial_state(config: &ScenarioConfig, eq: &EquationKind, grid: &Grid) -> Result<ScalarField> {
    let name = config.initial.as_str();
    if let Some(path) = name.strip_prefix("snapshot:") {
        let field = snapshot::load_field(std::path::Path::new(path))
            .with_context(|| format!("loading snapshot {path}"))?;
        if field.grid() != grid {
            bail!("snapshot grid does not match the configured grid");
        }
        return Ok(field);
    }

    let a = config.amplitude;
    let stream_profile = |f0: ScalarField| -> Result<ScalarField> {
        match eq {
            EquationKind::ContactEa { model } | EquationKind::CamassaHolm { model } => {
                Ok(model.contact_laplacian(&f0)?.dealias())
            }
            _ => Ok(f0.dealias()),
        }
    };

    match name {
        "cos-z" => {
            if grid.ndim() != 3 {
                bail!("initial `cos-z` needs a 3-D grid");
            }
            stream_profile(ScalarField::from_fn(grid, |x| a * x[2].cos()))
        }
        "sin-x" => stream_profile(ScalarField::from_fn(grid, |x| a * x[0].sin())),
        "random-trig" => stream_profile(ScalarField::random_trig(grid, 3, a, config.seed)),
        "gauss-bump" => {
            if grid.ndim() != 1 {
                bail!("initial `gauss-bump` needs a 1-D grid");
            }
            Ok(periodic_gaussian(grid, 0.25).scaled(a).dealias())
        }
        "phi-bump" => {
            if !matches!(eq, EquationKind::Reduced1d { .. }) {
                bail!("initial `phi-bump` is for the reduced-1d equation");
            }
            let phi = ScalarField::from_fn(grid, |x| {
                let s = if x[0] < 0.5 * grid.length(0) {
                    x[0]
                } else {
                    x[0] - grid.length(0)
                };
                a * (-0.25 * s * s).exp()
            });
            Ok(phi.dealias())
        }
        "g-negative-even" => {
            if !matches!(eq, EquationKind::Reduced1d { .. }) {
                bail!("initial `g-negative-even` is for the reduced-1d equation");
            }
            let g0 = ScalarField::from_fn(grid, |x| {
                let s = if x[0] < 0.5 * grid.length(0) {
                    x[0]
                } else {
                    x[0] - grid.length(0)
                };
                -a * (-s * s).exp()
            });
            Ok(g0.one_minus_laplacian().dealias())
        }
        other => bail!(
            "unknown initial condition `{other}` (one of: cos-z, sin-x, random-trig, gauss-bump, \
             phi-bump, g-negative-even, snapshot:PATH)"
        ),
    }
}

/// Named presets: every acceptance scenario is one command.
pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "quanto-steady",
        "T3 quantomorphism data f0 = cos z: E(f) and m stay fixed (totally geodesic)",
        "equation = contact-ea\ngrid = 32,32,32\ninitial = cos-z\nt_end = 1.0\ndt = 0.01\ncadence = 10\n",
    ),
    (
        "torus-conservation",
        "T3 generic band-limited data: C0/C1 conservation at desk scale",
        "equation = contact-ea\ngrid = 32,32,32\ninitial = random-trig\namplitude = 0.2\nseed = 7\nt_end = 0.5\ndt = 0.01\ncadence = 5\n",
    ),
    (
        "contact-transport",
        "T3 run with a 10^3 particle flow map verifying the momentum transport law",
        "equation = contact-ea\ngrid = 32,32,32\ninitial = random-trig\namplitude = 0.15\nseed = 7\nt_end = 0.5\ndt = 0.0125\ncadence = 5\nparticles = 10\n",
    ),
    (
        "ch-smooth",
        "Camassa-Holm momentum bump traveling right; C0 conserved",
        "equation = camassa-holm\ngrid = 256\ninitial = gauss-bump\namplitude = 1.0\nt_end = 1.0\ndt = 0.002\ncadence = 25\n",
    ),
    (
        "ch-blowup",
        "Camassa-Holm with sign-changing momentum: wave breaking, exit code 2",
        "equation = camassa-holm\ngrid = 256\ninitial = sin-x\namplitude = 1.0\nt_end = 10.0\ndt = 0.002\ncadence = 10\nblowup_threshold = 100\n",
    ),
    (
        "qg-casimir",
        "quasigeostrophic f-plane at alpha = 1: vorticity Casimirs conserved",
        "equation = quasigeostrophic\ngrid = 128,128\nalpha = 1.0\ninitial = random-trig\namplitude = 1.0\nseed = 11\nt_end = 1.0\ndt = 0.005\ncadence = 20\n",
    ),
    (
        "beta-plane",
        "beta-plane at alpha = beta = 1 with sawtooth psi: mean vorticity conserved",
        "equation = beta-plane\ngrid = 128,128\nalpha = 1.0\nbeta = 1.0\ninitial = random-trig\namplitude = 1.0\nseed = 11\nt_end = 1.0\ndt = 0.005\ncadence = 20\n",
    ),
    (
        "reduce1d-global",
        "reduced 1-D equation, nonnegative momentum: runs to t = 10 with bounded g",
        "equation = reduced-1d\ngrid = 1024\nlengths = 40\ninitial = phi-bump\namplitude = 0.5\nt_end = 10.0\ndt = 0.002\ncadence = 100\n",
    ),
    (
        "reduce1d-blowup",
        "reduced 1-D equation, even negative g0: finite-time blowup, exit code 2",
        "equation = reduced-1d\ngrid = 1024\nlengths = 40\ninitial = g-negative-even\namplitude = 1.0\nt_end = 5.0\ndt = 0.0005\ncadence = 20\nblowup_threshold = 1e4\n",
    ),
];

pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, text)| *text)
        .ok_or_else(|| {
            anyhow!(
                "unknown preset `{name}` (available: {})",
                PRESETS
                    .iter()
                    .map(|(n, _, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_lists_required_keys() {
        let pairs = parse_key_values("").unwrap();
        let err = ScenarioConfig::from_pairs(&pairs).unwrap_err().to_string();
        assert!(err.contains("equation"), "{err}");
        assert!(err.contains("grid"), "{err}");
        assert!(err.contains("t_end"), "{err}");
    }

    #[test]
    fn duplicate_key_is_an_error_naming_the_key() {
        let err = parse_key_values("dt = 0.1\ndt = 0.2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("duplicate key `dt`"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let pairs = parse_key_values("equation = camassa-holm\ngrid = 256\nt_end = 1\nbogus = 3\n")
            .unwrap();
        let err = ScenarioConfig::from_pairs(&pairs).unwrap_err().to_string();
        assert!(err.contains("unknown key `bogus`"), "{err}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse_key_values("equation = ok\nthis line is broken\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let pairs =
            parse_key_values("# a scenario\n\nequation = camassa-holm\ngrid = 256\nt_end = 0.5\n")
                .unwrap();
        let cfg = ScenarioConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.equation, "camassa-holm");
        assert_eq!(cfg.grid_dims, vec![256]);
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.dt, 0.01); // default
        assert!(cfg.dealias);
    }

    #[test]
    fn quanto_steady_preset_builds_the_documented_scenario() {
        let pairs = parse_key_values(preset_text("quanto-steady").unwrap()).unwrap();
        let cfg = ScenarioConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.equation, "contact-ea");
        assert_eq!(cfg.grid_dims, vec![32, 32, 32]);
        assert_eq!(cfg.initial, "cos-z");
        assert_eq!(cfg.t_end, 1.0);
        let scenario = build_scenario(cfg).unwrap();
        // m0 = Λ̃ cos z = 2 cos z
        let expect = ScalarField::from_fn(scenario.eq.grid(), |x| 2.0 * x[2].cos());
        assert!(scenario.m0.sub(&expect).unwrap().linf() <= 1e-10);
    }

    #[test]
    fn overrides_replace_and_append() {
        let base = parse_key_values("equation = camassa-holm\ngrid = 256\nt_end = 1\n").unwrap();
        let merged = apply_overrides(
            base,
            &[
                ("t_end".to_string(), "2.5".to_string()),
                ("seed".to_string(), "9".to_string()),
            ],
        );
        let cfg = ScenarioConfig::from_pairs(&merged).unwrap();
        assert_eq!(cfg.t_end, 2.5);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn every_preset_builds() {
        for (name, _, text) in PRESETS {
            let pairs = parse_key_values(text).unwrap();
            let cfg =
                ScenarioConfig::from_pairs(&pairs).unwrap_or_else(|e| panic!("preset {name}: {e}"));
            build_scenario(cfg).unwrap_or_else(|e| panic!("preset {name}: {e}"));
        }
    }

    #[test]
    fn snapshot_initial_grid_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.snap");
        let g = Grid::uniform(&[64]).unwrap();
        snapshot::save_field(&path, &ScalarField::constant(&g, 1.0)).unwrap();
        let text = format!(
            "equation = camassa-holm\ngrid = 256\nt_end = 1\ninitial = snapshot:{}\n",
            path.display()
        );
        let pairs = parse_key_values(&text).unwrap();
        let cfg = ScenarioConfig::from_pairs(&pairs).unwrap();
        let err = build_scenario(cfg).unwrap_err().to_string();
        assert!(err.contains("does not match"), "{err}");
    }
}
