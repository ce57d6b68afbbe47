//! Conserved-quantity evaluation, breakdown monitoring and CSV time series.
//!
//! For the contact Euler-Arnold flow the monitored invariants are
//!
//! ```text
//! C₀ = ∫ m dμ,   C₁ = ∫ m f dμ,   C₋₁,± = ∫ m_±^r dμ,   r = (n+1)/(n+2),
//! ```
//!
//! together with the breakdown integral `∫₀ᵗ ‖E(f)‖_∞ dτ`: solutions persist
//! exactly as long as that integral stays finite, so a rapidly growing tail
//! is the signature of blowup.
//!
//! `C₋₁,±` is transported on sign-definite regions; grid cells straddling the
//! zero set of m break the discrete analogue, so records carry a
//! `cm1_sign_definite` flag and the value is only trusted when it is set.

use crate::contact::{ContactModel, ModelKind};
use crate::error::{Error, Result};
use crate::spectral::ScalarField;
use std::io::Write;

/// One diagnostics sample. `bkm_integral` is nondecreasing along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// ∫ m dμ
    pub c0: f64,
    /// ∫ m f dμ for contact kinds; ∫ ω² dμ (enstrophy) for quotient kinds.
    pub c1: f64,
    /// ∫ m₊^r dμ
    pub cm1_plus: f64,
    /// ∫ m₋^r dμ
    pub cm1_neg: f64,
    /// ∫₀ᵗ ‖E(f)‖_∞ dτ, left-endpoint rule accumulated per step.
    pub bkm_integral: f64,
    pub reeb_f_linf: f64,
    pub m_linf: f64,
    pub m_min: f64,
    /// True when m is strictly one-signed, i.e. the C₋₁ values are reliable.
    pub cm1_sign_definite: bool,
}

impl DiagnosticsRecord {
    pub fn zero_at(t: f64) -> Self {
        Self {
            t,
            c0: 0.0,
            c1: 0.0,
            cm1_plus: 0.0,
            cm1_neg: 0.0,
            bkm_integral: 0.0,
            reeb_f_linf: 0.0,
            m_linf: 0.0,
            m_min: 0.0,
            cm1_sign_definite: false,
        }
    }
}

/// Signed-power integrals of the momentum: `(∫ m₊^r, ∫ m₋^r)`.
fn signed_power_integrals(m: &ScalarField, r: f64) -> (f64, f64) {
    let cell = m.grid().cell_volume();
    let mut plus = 0.0;
    let mut neg = 0.0;
    for &v in m.values() {
        if v > 0.0 {
            plus += v.powf(r);
        } else if v < 0.0 {
            neg += (-v).powf(r);
        }
    }
    (plus * cell, neg * cell)
}

/// Conserved quantities of the contact Euler-Arnold equation. Expects the
/// momentum/stream pair `m = Λ̃f`; quadrature is the rectangle rule on the
/// uniform grid (spectrally accurate for smooth periodic integrands).
pub fn conserved_quantities(
    model: &ContactModel,
    m: &ScalarField,
    f: &ScalarField,
    n: u32,
) -> Result<DiagnosticsRecord> {
    if m.grid() != model.grid() || f.grid() != model.grid() {
        return Err(Error::GridMismatch("conserved_quantities".into()));
    }
    momentum_quantities(m, f, n)
}

/// Same integrals without a model (used by the reduced 1-D equation, whose
/// momentum lives on a bare grid).
pub fn momentum_quantities(m: &ScalarField, f: &ScalarField, n: u32) -> Result<DiagnosticsRecord> {
    let r = (n as f64 + 1.0) / (n as f64 + 2.0);
    let (cm1_plus, cm1_neg) = signed_power_integrals(m, r);
    let m_min = m.min_value();
    let m_max = m.max_value();
    Ok(DiagnosticsRecord {
        t: 0.0,
        c0: m.integral(),
        c1: m.product(f)?.integral(),
        cm1_plus,
        cm1_neg,
        bkm_integral: 0.0,
        reeb_f_linf: 0.0,
        m_linf: m.linf(),
        m_min,
        cm1_sign_definite: m_min > 0.0 || m_max < 0.0,
    })
}

/// Casimirs of the quotient (quasigeostrophic) equations: the vorticity ω is
/// transported by an area-preserving flow, so every `∫ Φ(ω)` is conserved.
/// The energy slot `c1` carries the enstrophy `∫ ω²`; the `C₋₁` slots carry
/// the same signed 2/3-power integrals as the 3-D equation (n = 1).
pub fn quotient_quantities(omega: &ScalarField) -> DiagnosticsRecord {
    let (cm1_plus, cm1_neg) = signed_power_integrals(omega, 2.0 / 3.0);
    let m_min = omega.min_value();
    let m_max = omega.max_value();
    let cell = omega.grid().cell_volume();
    let c1 = omega.values().iter().map(|v| v * v).sum::<f64>() * cell;
    DiagnosticsRecord {
        t: 0.0,
        c0: omega.integral(),
        c1,
        cm1_plus,
        cm1_neg,
        bkm_integral: 0.0,
        reeb_f_linf: 0.0,
        m_linf: omega.linf(),
        m_min,
        cm1_sign_definite: m_min > 0.0 || m_max < 0.0,
    }
}

/// Accumulate the breakdown integral by one left-endpoint step:
/// `bkm += dt ‖E(f)‖_∞`.
pub fn bkm_update(
    record: &DiagnosticsRecord,
    model: &ContactModel,
    f: &ScalarField,
    dt: f64,
) -> Result<DiagnosticsRecord> {
    if dt <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bkm_update: dt = {dt} must be positive"
        )));
    }
    let reeb_f_linf = model.reeb_derivative(f)?.linf();
    let mut out = *record;
    out.bkm_integral += dt * reeb_f_linf;
    out.reeb_f_linf = reeb_f_linf;
    Ok(out)
}

/// Totally-geodesic probe on T³: `‖E(f)‖_∞`. Zero initially implies zero for
/// all time (quantomorphism data stays quantomorphic).
pub fn quanto_invariance(model: &ContactModel, f: &ScalarField) -> Result<f64> {
    if model.kind() != ModelKind::Torus3 {
        return Err(Error::UnsupportedKind {
            op: "quanto_invariance",
            kind: model.kind().to_string(),
        });
    }
    Ok(model.reeb_derivative(f)?.linf())
}

pub const CSV_HEADER: &str = "t,c0,c1,cm1_plus,cm1_neg,bkm,reeb_f_linf,m_linf,m_min\n";

pub fn write_csv_header<W: Write>(mut w: W) -> Result<()> {
    w.write_all(CSV_HEADER.as_bytes())?;
    Ok(())
}

/// One CSV row, 17 significant digits per value.
pub fn write_csv_row<W: Write>(mut w: W, r: &DiagnosticsRecord) -> Result<()> {
    writeln!(
        w,
        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
        r.t, r.c0, r.c1, r.cm1_plus, r.cm1_neg, r.bkm_integral, r.reeb_f_linf, r.m_linf, r.m_min
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::ContactModel;
    use crate::spectral::Grid;
    use std::f64::consts::TAU;

    #[test]
    fn zero_momentum_gives_zero_quantities() {
        let model = ContactModel::circle(Grid::uniform(&[32]).unwrap()).unwrap();
        let z = ScalarField::zeros(model.grid());
        let rec = conserved_quantities(&model, &z, &z, 0).unwrap();
        assert_eq!(rec.c0, 0.0);
        assert_eq!(rec.c1, 0.0);
        assert_eq!(rec.cm1_plus, 0.0);
        assert_eq!(rec.cm1_neg, 0.0);
        assert!(!rec.cm1_sign_definite);
    }

    #[test]
    fn constant_momentum_hand_quadrature() {
        // n = 0, m = 1 on S¹ of length 2π: C₀ = 2π, C₋₁,₊ = 2π·1^{1/2} = 2π,
        // C₁ = 2π since f = 1.
        let model = ContactModel::circle(Grid::uniform(&[32]).unwrap()).unwrap();
        let m = ScalarField::constant(model.grid(), 1.0);
        let f = model.inverse_contact_laplacian(&m).unwrap();
        let rec = conserved_quantities(&model, &m, &f, 0).unwrap();
        assert!((rec.c0 - TAU).abs() <= 1e-12);
        assert!((rec.cm1_plus - TAU).abs() <= 1e-12);
        assert!((rec.c1 - TAU).abs() <= 1e-12);
        assert_eq!(rec.cm1_neg, 0.0);
        assert!(rec.cm1_sign_definite);
    }

    #[test]
    fn exponent_is_two_thirds_for_n_one() {
        // r = (n+1)/(n+2): with m = const c > 0 on T³, C₋₁,₊ = c^{2/3} (2π)³.
        let model = ContactModel::torus3(Grid::uniform(&[8, 8, 8]).unwrap()).unwrap();
        let c = 8.0f64;
        let m = ScalarField::constant(model.grid(), c);
        let f = model.inverse_contact_laplacian(&m).unwrap();
        let rec = conserved_quantities(&model, &m, &f, 1).unwrap();
        let expect = c.powf(2.0 / 3.0) * TAU.powi(3);
        assert!((rec.cm1_plus - expect).abs() / expect <= 1e-12);
    }

    #[test]
    fn c1_equals_h1_energy() {
        let model = ContactModel::torus3(Grid::uniform(&[16, 16, 16]).unwrap()).unwrap();
        let f = ScalarField::random_trig(model.grid(), 3, 1.0, 9);
        let m = model.contact_laplacian(&f).unwrap();
        let rec = conserved_quantities(&model, &m, &f, 1).unwrap();
        let h1 = f.norms().h1;
        assert!(
            (rec.c1 - h1 * h1).abs() <= 1e-10,
            "gap {}",
            (rec.c1 - h1 * h1).abs()
        );
    }

    #[test]
    fn bkm_updates() {
        let model = ContactModel::torus3(Grid::uniform(&[16, 16, 16]).unwrap()).unwrap();
        // quantomorphism data: E(f) = 0, the integral stays zero
        let fz = ScalarField::from_fn(model.grid(), |x| x[2].cos());
        let mut rec = DiagnosticsRecord::zero_at(0.0);
        for _ in 0..5 {
            rec = bkm_update(&rec, &model, &fz, 0.1).unwrap();
        }
        assert!(rec.bkm_integral <= 1e-12);

        // constant rate: ‖E(f)‖∞ = 1 for f = sin x, integral = T exactly
        let f = ScalarField::from_fn(model.grid(), |x| x[0].sin());
        let mut rec = DiagnosticsRecord::zero_at(0.0);
        for _ in 0..10 {
            rec = bkm_update(&rec, &model, &f, 0.05).unwrap();
        }
        assert!((rec.bkm_integral - 0.5).abs() <= 1e-12);
        assert!((rec.reeb_f_linf - 1.0).abs() <= 1e-12);

        assert!(bkm_update(&rec, &model, &f, 0.0).is_err());
    }

    #[test]
    fn quanto_invariance_probe() {
        let model = ContactModel::torus3(Grid::uniform(&[16, 16, 16]).unwrap()).unwrap();
        let fz = ScalarField::from_fn(model.grid(), |x| (2.0 * x[2]).sin());
        assert!(quanto_invariance(&model, &fz).unwrap() <= 1e-12);
        let f = ScalarField::from_fn(model.grid(), |x| x[0].sin());
        // ‖sin z cos x‖∞ = 1 (both factors hit 1 on the grid)
        assert!((quanto_invariance(&model, &f).unwrap() - 1.0).abs() <= 1e-12);

        let circle = ContactModel::circle(Grid::uniform(&[16]).unwrap()).unwrap();
        let g = ScalarField::zeros(circle.grid());
        assert!(quanto_invariance(&circle, &g).is_err());
    }

    #[test]
    fn bkm_left_endpoint_agrees_with_trapezoid_recomputation() {
        use crate::evolution::{run, EquationKind, RunConfig, StepperConfig};
        let grid = Grid::uniform(&[128]).unwrap();
        let f0 = ScalarField::from_fn(&grid, |x| 0.4 * x[0].sin() + 0.2 * (3.0 * x[0]).cos());
        let m0 = f0.one_minus_laplacian().dealias();
        let model = ContactModel::circle(grid.clone()).unwrap();
        let eq = EquationKind::camassa_holm(model).unwrap();
        let dt = 0.002;
        let cfg = RunConfig {
            stepper: StepperConfig::new(dt).unwrap(),
            t_end: 0.5,
            cadence: 1,
        };
        let summary = run(eq, m0, &cfg, None, |_, _, _| Ok(())).unwrap();
        let recs = &summary.records;
        let mut trapezoid = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for w in recs.windows(2) {
            trapezoid += 0.5 * (w[0].reeb_f_linf + w[1].reeb_f_linf) * (w[1].t - w[0].t);
            lo = lo.min(w[0].reeb_f_linf);
            hi = hi.max(w[1].reeb_f_linf);
        }
        let gap = (recs.last().unwrap().bkm_integral - trapezoid).abs();
        assert!(
            gap <= dt * (hi - lo) + 1e-12,
            "left-endpoint vs trapezoid gap {gap:.3e} exceeds dt*(max-min) = {:.3e}",
            dt * (hi - lo)
        );
    }

    #[test]
    fn csv_format() {
        let mut rec = DiagnosticsRecord::zero_at(0.25);
        rec.c0 = 1.0 / 3.0;
        let mut buf = Vec::new();
        write_csv_header(&mut buf).unwrap();
        write_csv_row(&mut buf, &rec).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.trim_end());
        let row = lines.next().unwrap();
        assert!(row.starts_with("2.5000000000000000e-1,3.3333333333333331e-1,"));
        assert_eq!(row.split(',').count(), 9);
    }
}
