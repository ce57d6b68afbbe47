//! Built-in identity suites.
//!
//! Each suite checks a family of operator identities on randomized
//! band-limited trig polynomials and reports the worst defect against a
//! pinned tolerance. The CLI `verify` subcommand prints one line per suite
//! and exits nonzero on any failure; the acceptance tests assert on the same
//! reports.

use crate::contact::ContactModel;
use crate::error::Result;
use crate::evolution::{rhs, EquationKind, SimState};
use crate::peakon;
use crate::spectral::{Grid, ScalarField};

/// Divergence identity `div(S_θ f) = (n+1) E(f)` defect bound.
pub const DIVERGENCE_TOL: f64 = 1e-10;
/// `S_θ(1)` versus the Reeb field components.
pub const REEB_FROM_UNIT_TOL: f64 = 1e-12;
/// Contact Poisson bracket antisymmetry defect bound.
pub const ANTISYMMETRY_TOL: f64 = 1e-9;
/// Contact Poisson bracket Jacobi identity defect bound.
pub const JACOBI_TOL: f64 = 1e-7;
/// Camassa-Holm right-hand side versus the n = 0 contact Euler-Arnold path.
pub const REDUCTION_TOL: f64 = 1e-10;
/// Helmholtz inversion round trip on band-limited data.
pub const HELMHOLTZ_ROUNDTRIP_TOL: f64 = 1e-10;
/// Periodic Green function of 1 - ∂² against the line kernel at L = 20.
pub const GREEN_LINE_LIMIT_TOL: f64 = 1e-6;

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteReport {
    fn from_defect(name: &'static str, defect: f64, tol: f64) -> Self {
        Self {
            name,
            passed: defect <= tol,
            detail: format!("max defect {defect:.3e} (tolerance {tol:.1e})"),
        }
    }
}

fn torus_model(n: usize) -> Result<ContactModel> {
    ContactModel::torus3(Grid::uniform(&[n, n, n])?)
}

/// Operator identities on T³ (N = 32³): divergence law over 20 random trig
/// polynomials with up to 3 modes per axis, S_θ(1) against the Reeb field,
/// and the Helmholtz round trip.
pub fn operator_identity_suite(seed: u64) -> Result<SuiteReport> {
    let model = torus_model(32)?;
    let grid = model.grid().clone();

    let mut worst_div = 0.0f64;
    for i in 0..20 {
        let f = ScalarField::random_trig(&grid, 3, 1.0, seed.wrapping_add(i));
        let div = model.divergence_of_contact_field(&f)?;
        let target = model.reeb_derivative(&f)?.scaled((model.n() + 1) as f64);
        worst_div = worst_div.max(div.sub(&target)?.linf());
    }

    let one = ScalarField::constant(&grid, 1.0);
    let u = model.contact_vector_field(&one)?;
    let sz = ScalarField::from_fn(&grid, |x| x[2].sin());
    let cz = ScalarField::from_fn(&grid, |x| x[2].cos());
    let reeb_gap = u
        .component(0)
        .sub(&sz)?
        .linf()
        .max(u.component(1).sub(&cz)?.linf())
        .max(u.component(2).linf());

    let mut worst_round = 0.0f64;
    for i in 0..5 {
        let f = ScalarField::random_trig(&grid, 4, 1.0, seed.wrapping_add(1000 + i));
        let back = f.one_minus_laplacian().helmholtz_inverse();
        worst_round = worst_round.max(back.sub(&f)?.linf());
    }

    let passed = worst_div <= DIVERGENCE_TOL
        && reeb_gap <= REEB_FROM_UNIT_TOL
        && worst_round <= HELMHOLTZ_ROUNDTRIP_TOL;
    Ok(SuiteReport {
        name: "operator-identities",
        passed,
        detail: format!(
            "div defect {worst_div:.3e} (<= {DIVERGENCE_TOL:.0e}), S(1) vs Reeb {reeb_gap:.3e} \
             (<= {REEB_FROM_UNIT_TOL:.0e}), Helmholtz roundtrip {worst_round:.3e} \
             (<= {HELMHOLTZ_ROUNDTRIP_TOL:.0e})"
        ),
    })
}

/// Bracket suite on T³ (N = 32³): antisymmetry over random pairs and the
/// Jacobi identity over random triples with up to 2 modes per axis.
pub fn bracket_suite(seed: u64) -> Result<SuiteReport> {
    let model = torus_model(32)?;
    let grid = model.grid().clone();

    let mut worst_anti = 0.0f64;
    for i in 0..8 {
        let f = ScalarField::random_trig(&grid, 3, 1.0, seed.wrapping_add(2000 + 2 * i));
        let g = ScalarField::random_trig(&grid, 3, 1.0, seed.wrapping_add(2001 + 2 * i));
        let fg = model.contact_poisson(&f, &g)?;
        let gf = model.contact_poisson(&g, &f)?;
        worst_anti = worst_anti.max(fg.add(&gf)?.linf());
    }

    let mut worst_jacobi = 0.0f64;
    for i in 0..4 {
        let f = ScalarField::random_trig(&grid, 2, 1.0, seed.wrapping_add(3000 + 3 * i));
        let g = ScalarField::random_trig(&grid, 2, 1.0, seed.wrapping_add(3001 + 3 * i));
        let h = ScalarField::random_trig(&grid, 2, 1.0, seed.wrapping_add(3002 + 3 * i));
        let cyc = model
            .contact_poisson(&f, &model.contact_poisson(&g, &h)?)?
            .add(&model.contact_poisson(&g, &model.contact_poisson(&h, &f)?)?)?
            .add(&model.contact_poisson(&h, &model.contact_poisson(&f, &g)?)?)?;
        worst_jacobi = worst_jacobi.max(cyc.linf());
    }

    let passed = worst_anti <= ANTISYMMETRY_TOL && worst_jacobi <= JACOBI_TOL;
    Ok(SuiteReport {
        name: "bracket",
        passed,
        detail: format!(
            "antisymmetry {worst_anti:.3e} (<= {ANTISYMMETRY_TOL:.0e}), \
             Jacobi {worst_jacobi:.3e} (<= {JACOBI_TOL:.0e})"
        ),
    })
}

/// Reduction equivalence on S¹ (N = 256): the contact Euler-Arnold right-hand
/// side at n = 0 against the direct Camassa-Holm formula on 50 random states.
pub fn reduction_suite(seed: u64) -> Result<SuiteReport> {
    let grid = Grid::uniform(&[256])?;
    let mut worst = 0.0f64;
    for i in 0..50 {
        let m0 = ScalarField::random_trig(&grid, 8, 1.0, seed.wrapping_add(4000 + i)).dealias();
        let ea = SimState::new(
            EquationKind::contact_ea(ContactModel::circle(grid.clone())?)?,
            m0.clone(),
        )?;
        let ch = SimState::new(
            EquationKind::camassa_holm(ContactModel::circle(grid.clone())?)?,
            m0,
        )?;
        worst = worst.max(rhs(&ea)?.sub(&rhs(&ch)?)?.linf());
    }
    Ok(SuiteReport::from_defect(
        "reduction-equivalence",
        worst,
        REDUCTION_TOL,
    ))
}

/// Steady singular shear verification on T³.
pub fn steady_shear_suite() -> Result<SuiteReport> {
    let grid = Grid::uniform(&[8, 8, 128])?;
    let report = peakon::steady_shear_verify(&grid)?;
    Ok(SuiteReport {
        name: "steady-shear",
        passed: report.pass(),
        detail: format!(
            "helmholtz {:.3e}, frame {:.3e}, |u_z| {:.3e}, limits {:.3e}/{:.3e}, jump {:.12e}",
            report.helmholtz_residual,
            report.frame_mismatch,
            report.max_z_component,
            report.limit_minus_error,
            report.limit_plus_error,
            report.jump_x
        ),
    })
}

/// Periodic Green function checks: symmetry, the spectral delta residual and
/// the line-kernel limit.
pub fn green_function_suite() -> Result<SuiteReport> {
    let mut worst_sym = 0.0f64;
    for i in 0..20 {
        let x = 0.31 * i as f64;
        let a = peakon::green_periodic(x, std::f64::consts::TAU)?;
        let b = peakon::green_periodic(-x, std::f64::consts::TAU)?;
        worst_sym = worst_sym.max((a - b).abs());
    }
    let mut worst_line = 0.0f64;
    let mut x = 0.0;
    while x <= 3.0 {
        let g = peakon::green_periodic(x, 20.0)?;
        worst_line = worst_line.max((g - 0.5 * (-x).exp()).abs());
        x += 0.05;
    }
    let passed = worst_sym <= 1e-14 && worst_line <= GREEN_LINE_LIMIT_TOL;
    Ok(SuiteReport {
        name: "green-function",
        passed,
        detail: format!(
            "symmetry {worst_sym:.3e}, line-kernel limit {worst_line:.3e} \
             (<= {GREEN_LINE_LIMIT_TOL:.0e})"
        ),
    })
}

/// Run every suite with one base seed.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        operator_identity_suite(seed)?,
        bracket_suite(seed)?,
        reduction_suite(seed)?,
        steady_shear_suite()?,
        green_function_suite()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for report in run_all(20260810).unwrap() {
            assert!(report.passed, "{}: {}", report.name, report.detail);
        }
    }
}
