//! Concrete contact manifolds and their operator calculus.
//!
//! Three flat periodic models are supported:
//!
//! - `CircleCh` — S¹ with θ = dx: Reeb field `E = ∂_x`, contact field
//!   `S_θ f = f ∂_x`, contact Laplacian `Λ̃f = f - f_xx` (n = 0). The
//!   Euler-Arnold flow here is the Camassa-Holm equation.
//! - `Torus3` — T³ with θ = sin z dx + cos z dy and the flat associated
//!   metric (n = 1): `E = sin z ∂_x + cos z ∂_y` and
//!   `S_θ f = (f sin z + f_z cos z) ∂_x + (f cos z - f_z sin z) ∂_y
//!            + (f_y sin z - f_x cos z) ∂_z`.
//! - `QuantoTorus2` — the Boothby-Wang quotient T² carrying Reeb-invariant
//!   data; contact fields descend to Hamiltonian fields `(-f_y, f_x)` and the
//!   contact bracket to the standard Poisson bracket.
//!
//! The divergence identity `div(S_θ f) = (n+1) E(f)` and the bracket
//! `{f,g} = S_θ f(g) - g E(f)` are implemented exactly as stated and are
//! re-verified numerically by [`crate::verify`].

use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, VectorField};
use std::f64::consts::TAU;

/// Which concrete contact manifold a [`ContactModel`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// S¹, the Camassa-Holm case (n = 0).
    CircleCh,
    /// T³ with θ = sin z dx + cos z dy (n = 1).
    Torus3,
    /// Boothby-Wang quotient T² of a regular 3-D contact manifold (n = 1,
    /// Reeb direction quotiented away).
    QuantoTorus2,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::CircleCh => "CircleCh",
            ModelKind::Torus3 => "Torus3",
            ModelKind::QuantoTorus2 => "QuantoTorus2",
        };
        f.write_str(s)
    }
}

/// A concrete contact manifold instance: selects every operator formula.
#[derive(Debug, Clone)]
pub struct ContactModel {
    kind: ModelKind,
    n: u32,
    grid: Grid,
    /// sin z / cos z sampled along the z axis (Torus3 only).
    sin_z: Vec<f64>,
    cos_z: Vec<f64>,
}

impl ContactModel {
    /// S¹ model on a 1-D grid.
    pub fn circle(grid: Grid) -> Result<Self> {
        if grid.ndim() != 1 {
            return Err(Error::InvalidArgument(format!(
                "CircleCh needs a 1-D grid, got {} axes",
                grid.ndim()
            )));
        }
        Ok(Self {
            kind: ModelKind::CircleCh,
            n: 0,
            grid,
            sin_z: Vec::new(),
            cos_z: Vec::new(),
        })
    }

    /// T³ model. All three periods must be 2π: the frame coefficients sin z,
    /// cos z require a z-period of 2π, and the associated flat metric makes
    /// the remaining periods 2π as well.
    pub fn torus3(grid: Grid) -> Result<Self> {
        if grid.ndim() != 3 {
            return Err(Error::InvalidArgument(format!(
                "Torus3 needs a 3-D grid, got {} axes",
                grid.ndim()
            )));
        }
        for a in 0..3 {
            if (grid.length(a) - TAU).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "Torus3 axis {a} period must be 2π, got {}",
                    grid.length(a)
                )));
            }
        }
        let zs = grid.coords(2);
        Ok(Self {
            kind: ModelKind::Torus3,
            n: 1,
            sin_z: zs.iter().map(|z| z.sin()).collect(),
            cos_z: zs.iter().map(|z| z.cos()).collect(),
            grid,
        })
    }

    /// Boothby-Wang quotient model on a 2-D grid.
    pub fn quanto_torus2(grid: Grid) -> Result<Self> {
        if grid.ndim() != 2 {
            return Err(Error::InvalidArgument(format!(
                "QuantoTorus2 needs a 2-D grid, got {} axes",
                grid.ndim()
            )));
        }
        Ok(Self {
            kind: ModelKind::QuantoTorus2,
            n: 1,
            grid,
            sin_z: Vec::new(),
            cos_z: Vec::new(),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Contact dimension parameter n (the manifold has dimension 2n+1).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check_field(&self, f: &ScalarField, what: &str) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch(format!(
                "{what}: field grid does not match the model grid"
            )));
        }
        Ok(())
    }

    /// Reeb derivative `E(f)`.
    ///
    /// CircleCh: `f_x`. Torus3: `sin z f_x + cos z f_y`. QuantoTorus2: zero
    /// (the Reeb direction is quotiented; quotient data is Reeb-invariant by
    /// construction).
    pub fn reeb_derivative(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check_field(f, "reeb_derivative")?;
        match self.kind {
            ModelKind::CircleCh => f.partial_derivative(0),
            ModelKind::Torus3 => {
                let fx = f.partial_derivative(0)?;
                let fy = f.partial_derivative(1)?;
                let nz = self.grid.size(2);
                let mut out = ScalarField::zeros(&self.grid);
                for i in 0..self.grid.total() {
                    let iz = i % nz;
                    out.values_mut()[i] = torus3_reeb_combine(
                        fx.values()[i],
                        fy.values()[i],
                        self.sin_z[iz],
                        self.cos_z[iz],
                    );
                }
                Ok(out)
            }
            ModelKind::QuantoTorus2 => Ok(ScalarField::zeros(&self.grid)),
        }
    }

    /// The contact vector field `u = S_θ f`.
    ///
    /// CircleCh returns the single component `f` (u = f ∂_x). Torus3 uses the
    /// explicit frame formula. The quotient model has no contact field in
    /// these coordinates; use [`ContactModel::hamiltonian_field`].
    pub fn contact_vector_field(&self, f: &ScalarField) -> Result<VectorField> {
        self.check_field(f, "contact_vector_field")?;
        match self.kind {
            ModelKind::CircleCh => VectorField::new(vec![f.clone()]),
            ModelKind::Torus3 => {
                let fx = f.partial_derivative(0)?;
                let fy = f.partial_derivative(1)?;
                let fz = f.partial_derivative(2)?;
                let nz = self.grid.size(2);
                let mut ux = ScalarField::zeros(&self.grid);
                let mut uy = ScalarField::zeros(&self.grid);
                let mut uz = ScalarField::zeros(&self.grid);
                for i in 0..self.grid.total() {
                    let iz = i % nz;
                    let u = torus3_frame_combine(
                        f.values()[i],
                        fx.values()[i],
                        fy.values()[i],
                        fz.values()[i],
                        self.sin_z[iz],
                        self.cos_z[iz],
                    );
                    ux.values_mut()[i] = u[0];
                    uy.values_mut()[i] = u[1];
                    uz.values_mut()[i] = u[2];
                }
                VectorField::new(vec![ux, uy, uz])
            }
            ModelKind::QuantoTorus2 => Err(Error::UnsupportedKind {
                op: "contact_vector_field",
                kind: self.kind.to_string(),
            }),
        }
    }

    /// Symplectic gradient `(-f_y, f_x)` on the quotient T².
    pub fn hamiltonian_field(&self, f: &ScalarField) -> Result<VectorField> {
        self.check_field(f, "hamiltonian_field")?;
        if self.kind != ModelKind::QuantoTorus2 {
            return Err(Error::UnsupportedKind {
                op: "hamiltonian_field",
                kind: self.kind.to_string(),
            });
        }
        let fx = f.partial_derivative(0)?;
        let fy = f.partial_derivative(1)?;
        VectorField::new(vec![fy.scaled(-1.0), fx])
    }

    /// Directional derivative `u(m) = Σ_i u_i ∂_i m`, dealiased.
    pub fn advect(&self, u: &VectorField, m: &ScalarField) -> Result<ScalarField> {
        self.check_field(m, "advect")?;
        if u.grid() != &self.grid {
            return Err(Error::GridMismatch(
                "advect: velocity grid does not match the model grid".into(),
            ));
        }
        let mut acc = ScalarField::zeros(&self.grid);
        for (axis, ui) in u.components().iter().enumerate() {
            let dm = m.partial_derivative(axis)?;
            acc.axpy(1.0, &ui.product(&dm)?)?;
        }
        Ok(acc.dealias())
    }

    /// Contact Poisson bracket `{f,g} = S_θ f(g) - g E(f)`; on the quotient,
    /// the standard Poisson bracket `f_x g_y - f_y g_x`. Products are
    /// dealiased, so the algebraic identities hold to truncation tolerance.
    pub fn contact_poisson(&self, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
        self.check_field(f, "contact_poisson")?;
        self.check_field(g, "contact_poisson")?;
        match self.kind {
            ModelKind::QuantoTorus2 => {
                let fx = f.partial_derivative(0)?;
                let fy = f.partial_derivative(1)?;
                let gx = g.partial_derivative(0)?;
                let gy = g.partial_derivative(1)?;
                Ok(fx.product(&gy)?.sub(&fy.product(&gx)?)?.dealias())
            }
            _ => {
                let u = self.contact_vector_field(f)?;
                let sfg = self.advect(&u, g)?;
                let gef = g.product(&self.reeb_derivative(f)?)?.dealias();
                sfg.sub(&gef)
            }
        }
    }

    /// Contact Laplacian `Λ̃f = f - Δf` (the momentum map).
    pub fn contact_laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check_field(f, "contact_laplacian")?;
        Ok(f.one_minus_laplacian())
    }

    /// Inverse of the contact Laplacian, `(1 - Δ)^{-1}`.
    pub fn inverse_contact_laplacian(&self, m: &ScalarField) -> Result<ScalarField> {
        self.check_field(m, "inverse_contact_laplacian")?;
        Ok(m.helmholtz_inverse())
    }

    /// Divergence of `S_θ f`, computed as Σ_i ∂_i u_i. By the divergence
    /// identity this must equal `(n+1) E(f)`; the equality is exposed as a
    /// numerical self-check rather than assumed.
    pub fn divergence_of_contact_field(&self, f: &ScalarField) -> Result<ScalarField> {
        let u = self.contact_vector_field(f)?;
        let mut acc = ScalarField::zeros(&self.grid);
        for (axis, ui) in u.components().iter().enumerate() {
            acc.axpy(1.0, &ui.partial_derivative(axis)?)?;
        }
        Ok(acc)
    }
}

/// Frame combination of the T³ contact field at a single point:
/// given f and its gradient together with sin z, cos z at the point, returns
/// the components of `S_θ f`. Shared by the grid operator, the Lagrangian
/// particle stages and the singular-shear verification so the frame algebra
/// has a single source of truth.
pub fn torus3_frame_combine(f: f64, fx: f64, fy: f64, fz: f64, sin_z: f64, cos_z: f64) -> [f64; 3] {
    [
        f * sin_z + fz * cos_z,
        f * cos_z - fz * sin_z,
        fy * sin_z - fx * cos_z,
    ]
}

/// Pointwise Reeb derivative on T³: `E(f) = sin z f_x + cos z f_y`.
pub fn torus3_reeb_combine(fx: f64, fy: f64, sin_z: f64, cos_z: f64) -> f64 {
    sin_z * fx + cos_z * fy
}

/// Stream function / momentum pair related by the contact Laplacian.
#[derive(Debug, Clone)]
pub struct ContactMomentumPair {
    pub f: ScalarField,
    pub m: ScalarField,
}

impl ContactMomentumPair {
    pub fn from_stream(model: &ContactModel, f: ScalarField) -> Result<Self> {
        let m = model.contact_laplacian(&f)?;
        Ok(Self { f, m })
    }

    pub fn from_momentum(model: &ContactModel, m: ScalarField) -> Result<Self> {
        let f = model.inverse_contact_laplacian(&m)?;
        Ok(Self { f, m })
    }

    /// Residual of the defining relation `m = Λ̃f` in the sup norm.
    pub fn consistency_residual(&self, model: &ContactModel) -> Result<f64> {
        Ok(model.contact_laplacian(&self.f)?.sub(&self.m)?.linf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn torus(n: usize) -> ContactModel {
        ContactModel::torus3(Grid::uniform(&[n, n, n]).unwrap()).unwrap()
    }

    fn circle(n: usize) -> ContactModel {
        ContactModel::circle(Grid::uniform(&[n]).unwrap()).unwrap()
    }

    #[test]
    fn constructors_validate_shapes() {
        assert!(ContactModel::circle(Grid::uniform(&[8, 8]).unwrap()).is_err());
        assert!(ContactModel::torus3(Grid::uniform(&[8]).unwrap()).is_err());
        assert!(ContactModel::torus3(Grid::new(&[8, 8, 8], &[TAU, TAU, 4.0]).unwrap()).is_err());
        assert!(ContactModel::quanto_torus2(Grid::uniform(&[8, 8, 8]).unwrap()).is_err());
        assert_eq!(circle(8).n(), 0);
        assert_eq!(torus(8).n(), 1);
    }

    #[test]
    fn reeb_derivative_cases() {
        let t = torus(16);
        // f = f(z): no x,y dependence -> E(f) = 0
        let fz = ScalarField::from_fn(t.grid(), |x| (2.0 * x[2]).cos());
        assert!(t.reeb_derivative(&fz).unwrap().linf() <= 1e-13);

        let c = circle(64);
        let f = ScalarField::from_fn(c.grid(), |x| x[0].sin());
        let e = c.reeb_derivative(&f).unwrap();
        let expect = ScalarField::from_fn(c.grid(), |x| x[0].cos());
        assert!(e.sub(&expect).unwrap().linf() <= 1e-12);

        // Torus3, f = sin x -> sin z cos x
        let f = ScalarField::from_fn(t.grid(), |x| x[0].sin());
        let e = t.reeb_derivative(&f).unwrap();
        let expect = ScalarField::from_fn(t.grid(), |x| x[2].sin() * x[0].cos());
        assert!(e.sub(&expect).unwrap().linf() <= 1e-12);

        // grid mismatch
        let other = ScalarField::zeros(&Grid::uniform(&[8, 8, 8]).unwrap());
        assert!(t.reeb_derivative(&other).is_err());
    }

    #[test]
    fn contact_field_of_one_is_reeb() {
        let t = torus(16);
        let one = ScalarField::constant(t.grid(), 1.0);
        let u = t.contact_vector_field(&one).unwrap();
        let sz = ScalarField::from_fn(t.grid(), |x| x[2].sin());
        let cz = ScalarField::from_fn(t.grid(), |x| x[2].cos());
        assert!(u.component(0).sub(&sz).unwrap().linf() <= 1e-12);
        assert!(u.component(1).sub(&cz).unwrap().linf() <= 1e-12);
        assert!(u.component(2).linf() <= 1e-12);
    }

    #[test]
    fn contact_field_closed_forms() {
        let c = circle(32);
        let f = ScalarField::from_fn(c.grid(), |x| x[0].sin());
        let u = c.contact_vector_field(&f).unwrap();
        assert_eq!(u.ndim(), 1);
        assert!(u.component(0).sub(&f).unwrap().linf() <= 1e-13);

        // Torus3, f = sin z: u = (sin²z + cos²z, 0, 0) = (1, 0, 0)
        let t = torus(16);
        let f = ScalarField::from_fn(t.grid(), |x| x[2].sin());
        let u = t.contact_vector_field(&f).unwrap();
        let one = ScalarField::constant(t.grid(), 1.0);
        assert!(u.component(0).sub(&one).unwrap().linf() <= 1e-12);
        assert!(u.component(1).linf() <= 1e-12);
        assert!(u.component(2).linf() <= 1e-12);

        let q = ContactModel::quanto_torus2(Grid::uniform(&[8, 8]).unwrap()).unwrap();
        let g = ScalarField::zeros(q.grid());
        assert!(matches!(
            q.contact_vector_field(&g),
            Err(Error::UnsupportedKind { .. })
        ));
    }

    #[test]
    fn hamiltonian_field_cases() {
        let q = ContactModel::quanto_torus2(Grid::uniform(&[32, 32]).unwrap()).unwrap();
        let c = ScalarField::constant(q.grid(), 2.0);
        assert!(q.hamiltonian_field(&c).unwrap().linf() <= 1e-13);

        let f = ScalarField::from_fn(q.grid(), |x| x[0].sin());
        let u = q.hamiltonian_field(&f).unwrap();
        let expect = ScalarField::from_fn(q.grid(), |x| x[0].cos());
        assert!(u.component(0).linf() <= 1e-13);
        assert!(u.component(1).sub(&expect).unwrap().linf() <= 1e-12);

        let t = torus(8);
        let g = ScalarField::zeros(t.grid());
        assert!(matches!(
            t.hamiltonian_field(&g),
            Err(Error::UnsupportedKind { .. })
        ));
    }

    #[test]
    fn quanto_bracket_reduces_to_expected_pattern() {
        // x-independent f: {f,g} = -f_y g_x
        let q = ContactModel::quanto_torus2(Grid::uniform(&[32, 32]).unwrap()).unwrap();
        let f = ScalarField::from_fn(q.grid(), |x| (2.0 * x[1]).sin());
        let g = ScalarField::from_fn(q.grid(), |x| x[0].cos() * x[1].sin());
        let br = q.contact_poisson(&f, &g).unwrap();
        let expect = ScalarField::from_fn(q.grid(), |x| {
            2.0 * (2.0 * x[1]).cos() * x[0].sin() * x[1].sin()
        });
        assert!(br.sub(&expect).unwrap().linf() <= 1e-11);
    }

    #[test]
    fn advect_cases() {
        let t = torus(16);
        let m = ScalarField::constant(t.grid(), 4.0);
        let u = t
            .contact_vector_field(&ScalarField::random_trig(t.grid(), 2, 1.0, 8))
            .unwrap();
        assert!(t.advect(&u, &m).unwrap().linf() <= 1e-12);

        // constant unit velocity in x against sin x
        let ones = VectorField::new(vec![
            ScalarField::constant(t.grid(), 1.0),
            ScalarField::zeros(t.grid()),
            ScalarField::zeros(t.grid()),
        ])
        .unwrap();
        let m = ScalarField::from_fn(t.grid(), |x| x[0].sin());
        let a = t.advect(&ones, &m).unwrap();
        let expect = ScalarField::from_fn(t.grid(), |x| x[0].cos());
        assert!(a.sub(&expect).unwrap().linf() <= 1e-12);
    }

    #[test]
    fn advect_matches_finite_difference_oracle() {
        // directional derivative via interpolation along the local velocity
        let t = torus(16);
        let f = ScalarField::random_trig(t.grid(), 2, 0.7, 21);
        let m = ScalarField::random_trig(t.grid(), 2, 1.0, 22);
        let u = t.contact_vector_field(&f).unwrap();
        let a = t.advect(&u, &m).unwrap();

        let probes = [[0.4, 1.3, 2.2], [3.0, 0.1, 5.5], [1.0, 4.4, 0.7]];
        for p in probes {
            let uvec: Vec<f64> = (0..3)
                .map(|i| u.component(i).interpolate(&p).unwrap()[0])
                .collect();
            let adv = a.interpolate(&p).unwrap()[0];
            let fd = |eps: f64| {
                let plus: Vec<f64> = (0..3).map(|i| p[i] + eps * uvec[i]).collect();
                let minus: Vec<f64> = (0..3).map(|i| p[i] - eps * uvec[i]).collect();
                (m.interpolate(&plus).unwrap()[0] - m.interpolate(&minus).unwrap()[0]) / (2.0 * eps)
            };
            let e1 = (fd(2e-3) - adv).abs();
            let e2 = (fd(1e-3) - adv).abs();
            assert!(e2 <= 1e-4, "fd mismatch {e2}");
            // O(h²): quarter the error under halving, with slack for rounding
            if e1 > 1e-9 {
                assert!(e2 <= 0.3 * e1, "not second order: {e1} -> {e2}");
            }
        }
    }

    #[test]
    fn bracket_with_constants_gives_reeb_derivative() {
        let t = torus(16);
        let one = ScalarField::constant(t.grid(), 1.0);
        let f = ScalarField::random_trig(t.grid(), 2, 1.0, 31);
        let ef = t.reeb_derivative(&f).unwrap();
        // {1, f} = E(f)
        let b = t.contact_poisson(&one, &f).unwrap();
        assert!(b.sub(&ef).unwrap().linf() <= 1e-10);
        // {f, 1} = -E(f)
        let b = t.contact_poisson(&f, &one).unwrap();
        assert!(b.add(&ef).unwrap().linf() <= 1e-10);
    }

    #[test]
    fn bracket_of_z_only_functions_vanishes() {
        let t = torus(16);
        let f = ScalarField::from_fn(t.grid(), |x| x[2].sin());
        let g = ScalarField::from_fn(t.grid(), |x| (3.0 * x[2]).cos());
        assert!(t.contact_poisson(&f, &g).unwrap().linf() <= 1e-12);
    }

    #[test]
    fn laplacian_cases_and_roundtrip() {
        let c = circle(32);
        let k = ScalarField::constant(c.grid(), 5.0);
        assert!(c.contact_laplacian(&k).unwrap().sub(&k).unwrap().linf() <= 1e-13);

        let f = ScalarField::from_fn(c.grid(), |x| x[0].sin());
        let m = c.contact_laplacian(&f).unwrap();
        assert!(m.sub(&f.scaled(2.0)).unwrap().linf() <= 1e-12);

        let t = torus(16);
        let f = ScalarField::random_trig(t.grid(), 4, 1.0, 17);
        let back = t
            .inverse_contact_laplacian(&t.contact_laplacian(&f).unwrap())
            .unwrap();
        assert!(back.sub(&f).unwrap().linf() <= 1e-10);
    }

    #[test]
    fn contact_laplacian_self_adjoint_and_positive() {
        let t = torus(16);
        let cell = t.grid().cell_volume();
        let f = ScalarField::random_trig(t.grid(), 2, 1.0, 41);
        let g = ScalarField::random_trig(t.grid(), 2, 1.0, 42);
        let lf = t.contact_laplacian(&f).unwrap();
        let lg = t.contact_laplacian(&g).unwrap();
        let a: f64 = f.product(&lg).unwrap().values().iter().sum::<f64>() * cell;
        let b: f64 = g.product(&lf).unwrap().values().iter().sum::<f64>() * cell;
        assert!(
            (a - b).abs() <= 1e-10,
            "self-adjointness gap {}",
            (a - b).abs()
        );
        let q: f64 = f.product(&lf).unwrap().values().iter().sum::<f64>() * cell;
        assert!(q >= 0.0);
    }

    #[test]
    fn divergence_identity() {
        // Torus3: div(S_θ f) = 2 E(f)
        let t = torus(32);
        for seed in 0..5u64 {
            let f = ScalarField::random_trig(t.grid(), 3, 1.0, 100 + seed);
            let div = t.divergence_of_contact_field(&f).unwrap();
            let ef = t.reeb_derivative(&f).unwrap();
            let gap = div.sub(&ef.scaled(2.0)).unwrap().linf();
            assert!(gap <= 1e-10, "seed {seed}: gap {gap}");
        }

        // CircleCh: div(f ∂_x) = f_x = 1·E(f)
        let c = circle(64);
        let f = ScalarField::from_fn(c.grid(), |x| x[0].sin());
        let div = c.divergence_of_contact_field(&f).unwrap();
        let ef = c.reeb_derivative(&f).unwrap();
        assert!(div.sub(&ef).unwrap().linf() <= 1e-12);

        // constants: the Reeb field is divergence-free
        let t8 = torus(8);
        let one = ScalarField::constant(t8.grid(), 1.0);
        assert!(t8.divergence_of_contact_field(&one).unwrap().linf() <= 1e-12);
    }

    #[test]
    fn bracket_antisymmetry_random() {
        let t = torus(16);
        for seed in 0..4u64 {
            let f = ScalarField::random_trig(t.grid(), 2, 1.0, 200 + seed);
            let g = ScalarField::random_trig(t.grid(), 2, 1.0, 300 + seed);
            let fg = t.contact_poisson(&f, &g).unwrap();
            let gf = t.contact_poisson(&g, &f).unwrap();
            assert!(fg.add(&gf).unwrap().linf() <= 1e-9);
        }
    }

    #[test]
    fn bracket_jacobi_identity_random() {
        let t = torus(16);
        for seed in 0..3u64 {
            let f = ScalarField::random_trig(t.grid(), 2, 1.0, 400 + seed);
            let g = ScalarField::random_trig(t.grid(), 2, 1.0, 500 + seed);
            let h = ScalarField::random_trig(t.grid(), 2, 1.0, 600 + seed);
            let a = t
                .contact_poisson(&f, &t.contact_poisson(&g, &h).unwrap())
                .unwrap();
            let b = t
                .contact_poisson(&g, &t.contact_poisson(&h, &f).unwrap())
                .unwrap();
            let c = t
                .contact_poisson(&h, &t.contact_poisson(&f, &g).unwrap())
                .unwrap();
            let total = a.add(&b).unwrap().add(&c).unwrap().linf();
            assert!(total <= 1e-7, "seed {seed}: jacobi defect {total}");
        }
    }

    #[test]
    fn momentum_pair_consistency() {
        let t = torus(16);
        let f = ScalarField::random_trig(t.grid(), 3, 1.0, 77);
        let pair = ContactMomentumPair::from_stream(&t, f).unwrap();
        assert!(pair.consistency_residual(&t).unwrap() <= 1e-10);
        let pair2 = ContactMomentumPair::from_momentum(&t, pair.m.clone()).unwrap();
        assert!(pair2.consistency_residual(&t).unwrap() <= 1e-10);
    }

    #[test]
    fn frame_combine_of_unit_stream_is_reeb() {
        // S_θ(1) = Reeb field pointwise
        for &z in &[0.0f64, 0.7, 2.0, 4.5] {
            let u = torus3_frame_combine(1.0, 0.0, 0.0, 0.0, z.sin(), z.cos());
            assert!((u[0] - z.sin()).abs() <= 1e-15);
            assert!((u[1] - z.cos()).abs() <= 1e-15);
            assert_eq!(u[2], 0.0);
        }
    }
}
