//! Ground-state manifold of the stationary Gross–Pitaevskii problem
//!
//!   −Δψ + V_s ψ + b ψ³ = −E ψ,   ψ > 0,   E > 0,
//!
//! built by Newton continuation from the bifurcation off the linear bound
//! state. The manifold is parameterized by (E, s); the physically followed
//! branch pins the mass ‖ψ‖² to a constant η, which turns E into a function
//! of s governed by Ė = −⟨ψ, ∂ₛψ⟩/⟨ψ, ∂_Eψ⟩.

use crate::grid::{DomainError, Field, NormKind, RadialGrid};
use crate::potential::PotentialPath;
use crate::scalar::Real;
use crate::spectra::{SchrodingerOperator, SpectraError};
use crate::tridiag::{solve_tridiag, SymTridiag, TridiagError};
use crate::NonlinSign;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroundError {
    #[error(transparent)]
    Linear(#[from] SpectraError),
    #[error("target E = {e:e} lies on the wrong side of the bifurcation at {e_lin:e}")]
    TargetOnWrongSide { e: f64, e_lin: f64 },
    #[error("Newton stalled after {iters} iterations at residual {residual:e}")]
    NewtonStalled { iters: usize, residual: f64 },
    #[error("iterate lost positivity: ground-branch solutions are nodeless")]
    LostPositivity,
    #[error("mass target {eta:e} unreachable ({detail})")]
    MassTarget { eta: f64, detail: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerical(#[from] TridiagError),
}

/// One point ψ_{E,s} on the manifold.
#[derive(Clone)]
pub struct GroundState<T: Real> {
    pub energy: T,
    pub s: T,
    pub field: Field<T>,
    pub mass: T,
    pub residual: T,
    pub sign: NonlinSign,
}

/// A manifold point together with its first-order tangent data.
pub struct ManifoldPoint<T: Real> {
    pub state: GroundState<T>,
    /// ∂_E ψ at fixed s (solves L⁺ ∂_Eψ = −ψ).
    pub dpsi_de: Field<T>,
    /// ∂ₛ ψ at fixed E (solves L⁺ ∂ₛψ = −(∂ₛV) ψ).
    pub dpsi_ds: Field<T>,
    /// Ė required to hold the mass: −⟨ψ, ∂ₛψ⟩ / ⟨ψ, ∂_Eψ⟩.
    pub e_dot: T,
    /// ∂_E mass = 2⟨ψ, ∂_Eψ⟩, the nondegeneracy margin of the branch.
    pub d_mass_de: T,
}

/// The constant-mass branch sampled along s ∈ [0, 1].
pub struct GroundStateCurve<T: Real> {
    pub eta: T,
    pub s: Vec<T>,
    pub states: Vec<GroundState<T>>,
    pub dpsi_de: Vec<Field<T>>,
    pub dpsi_ds: Vec<Field<T>>,
    pub e_dot: Vec<T>,
    pub d_mass_de: Vec<T>,
}

impl<T: Real> GroundStateCurve<T> {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn energies(&self) -> Vec<T> {
        self.states.iter().map(|g| g.energy).collect()
    }

    pub fn worst_mass_error(&self) -> T {
        self.states
            .iter()
            .map(|g| (g.mass - self.eta).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn min_nondegeneracy(&self) -> T {
        self.d_mass_de
            .iter()
            .map(|x| x.abs())
            .fold(T::infinity(), |a, b| a.min(b))
    }
}

/// The (E, s) ↦ ψ_{E,s} solver family for one potential path and nonlinearity.
pub struct Manifold<T: Real> {
    grid: Arc<RadialGrid<T>>,
    path: PotentialPath<T>,
    sign: NonlinSign,
}

impl<T: Real> Manifold<T> {
    pub fn new(grid: &Arc<RadialGrid<T>>, path: PotentialPath<T>, sign: NonlinSign) -> Self {
        Self { grid: Arc::clone(grid), path, sign }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn path(&self) -> &PotentialPath<T> {
        &self.path
    }

    pub fn sign(&self) -> NonlinSign {
        self.sign
    }

    /// Linear operator −Δ + V_s at frozen s.
    pub fn linear_operator(&self, s: T) -> SchrodingerOperator<T> {
        let v = self.path.sample(&self.grid, s);
        SchrodingerOperator::new(&self.grid, v).expect("potential sample is finite")
    }

    /// Small-amplitude seed δ·v bifurcating from the linear bound state,
    /// sized so the nonlinear energy shift matches E_lin − E at first order.
    pub fn bifurcation_seed(&self, e: T, s: T) -> Result<Field<T>, GroundError> {
        let bs = self.linear_operator(s).bound_state()?;
        let e_lin = -bs.energy;
        let b = self.sign.as_scalar::<T>();
        let shift = (e_lin - e) * b;
        if shift <= T::zero() {
            return Err(GroundError::TargetOnWrongSide {
                e: e.to_f64().unwrap_or(f64::NAN),
                e_lin: e_lin.to_f64().unwrap_or(f64::NAN),
            });
        }
        let quartic = quartic_integral(&bs.field);
        let delta = (shift * b / (b * quartic)).sqrt();
        Ok(bs.field.scale_re(delta))
    }

    /// Newton solve of the stationary equation at (E, s). Without an explicit
    /// seed the bifurcation seed is used.
    pub fn stationary(
        &self,
        e: T,
        s: T,
        seed: Option<&Field<T>>,
    ) -> Result<GroundState<T>, GroundError> {
        let v = self.path.sample(&self.grid, s);
        let mat = assemble_shifted(&self.grid, &v, e);
        let mut u: Vec<T> = match seed {
            Some(f) => f.u().iter().map(|z| z.re).collect(),
            None => self
                .bifurcation_seed(e, s)?
                .u()
                .iter()
                .map(|z| z.re)
                .collect(),
        };
        let b = self.sign.as_scalar::<T>();
        let r = self.grid.nodes();
        let h = self.grid.spacing();
        let weight = (T::of(4.0) * T::PI() * h).sqrt();
        let vmax = v.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        let op_scale = T::of(2.0) / (h * h) + vmax + e.abs();

        let res_of = |u: &[T]| -> (Vec<T>, T) {
            let mut f = mat.apply(u);
            let mut norm2 = T::zero();
            for i in 0..u.len() {
                f[i] += b * u[i] * u[i] * u[i] / (r[i] * r[i]);
                norm2 += f[i] * f[i];
            }
            let n = norm2.sqrt() * weight;
            (f, n)
        };

        let unorm = |u: &[T]| u.iter().fold(T::zero(), |a, &x| a + x * x).sqrt() * weight;
        let (mut f, mut fnorm) = res_of(&u);
        let tight = T::epsilon() * T::of(16.0) * op_scale * unorm(&u).max(T::of(1e-3));
        let plateau = tight * T::of(64.0);
        let mut iters = 0usize;
        while fnorm > tight {
            iters += 1;
            if iters > 60 {
                return Err(GroundError::NewtonStalled {
                    iters,
                    residual: fnorm.to_f64().unwrap_or(f64::NAN),
                });
            }
            let jdiag: Vec<T> = (0..u.len())
                .map(|i| T::of(3.0) * b * u[i] * u[i] / (r[i] * r[i]))
                .collect();
            let jac = mat.with_added_diagonal(&jdiag);
            let neg_f: Vec<T> = f.iter().map(|&x| -x).collect();
            let step = solve_tridiag(&jac, &neg_f)?;
            let mut t = T::one();
            let mut improved = false;
            while t >= T::of(1e-4) {
                let trial: Vec<T> = u
                    .iter()
                    .zip(&step)
                    .map(|(&a, &d)| a + t * d)
                    .collect();
                let (tf, tn) = res_of(&trial);
                if tn < fnorm * (T::one() - t * T::of(0.25)) {
                    u = trial;
                    f = tf;
                    fnorm = tn;
                    improved = true;
                    break;
                }
                t *= T::of(0.5);
            }
            if !improved {
                if fnorm <= plateau {
                    break;
                }
                return Err(GroundError::NewtonStalled {
                    iters,
                    residual: fnorm.to_f64().unwrap_or(f64::NAN),
                });
            }
        }

        let umax = u.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
        if umax == T::zero() {
            return Err(GroundError::LostPositivity);
        }
        let floor = -umax * T::epsilon() * T::of(1e4);
        if u.iter().any(|&x| x < floor) {
            return Err(GroundError::LostPositivity);
        }
        let field = Field::from_real_u(&self.grid, u)?;
        let mass = field.norm(NormKind::L2)?.powi(2);
        Ok(GroundState { energy: e, s, field, mass, residual: fnorm, sign: self.sign })
    }

    /// L⁺ = −Δ + V_s + E + 3bψ², the symmetric linearization about `state`.
    pub fn lplus(&self, state: &GroundState<T>) -> SymTridiag<T> {
        let v = self.path.sample(&self.grid, state.s);
        let mat = assemble_shifted(&self.grid, &v, state.energy);
        let r = self.grid.nodes();
        let b = self.sign.as_scalar::<T>();
        let add: Vec<T> = state
            .field
            .u()
            .iter()
            .zip(r)
            .map(|(z, &ri)| T::of(3.0) * b * z.re * z.re / (ri * ri))
            .collect();
        mat.with_added_diagonal(&add)
    }

    /// L⁻ = −Δ + V_s + E + bψ²; annihilates ψ exactly at a stationary point.
    pub fn lminus(&self, state: &GroundState<T>) -> SymTridiag<T> {
        let v = self.path.sample(&self.grid, state.s);
        let mat = assemble_shifted(&self.grid, &v, state.energy);
        let r = self.grid.nodes();
        let b = self.sign.as_scalar::<T>();
        let add: Vec<T> = state
            .field
            .u()
            .iter()
            .zip(r)
            .map(|(z, &ri)| b * z.re * z.re / (ri * ri))
            .collect();
        mat.with_added_diagonal(&add)
    }

    pub fn dpsi_de(&self, state: &GroundState<T>) -> Result<Field<T>, GroundError> {
        let lp = self.lplus(state);
        let rhs: Vec<T> = state.field.u().iter().map(|z| -z.re).collect();
        let x = solve_tridiag(&lp, &rhs)?;
        Ok(Field::from_real_u(&self.grid, x)?)
    }

    pub fn dpsi_ds(&self, state: &GroundState<T>) -> Result<Field<T>, GroundError> {
        let lp = self.lplus(state);
        let dv = self.path.sample_ds(&self.grid, state.s);
        let rhs: Vec<T> = state
            .field
            .u()
            .iter()
            .zip(&dv)
            .map(|(z, &dva)| -dva * z.re)
            .collect();
        let x = solve_tridiag(&lp, &rhs)?;
        Ok(Field::from_real_u(&self.grid, x)?)
    }

    pub fn point(
        &self,
        e: T,
        s: T,
        seed: Option<&Field<T>>,
    ) -> Result<ManifoldPoint<T>, GroundError> {
        let state = self.stationary(e, s, seed)?;
        let dpsi_de = self.dpsi_de(&state)?;
        let dpsi_ds = self.dpsi_ds(&state)?;
        let num = state.field.inner(&dpsi_ds)?.re;
        let den = state.field.inner(&dpsi_de)?.re;
        Ok(ManifoldPoint {
            e_dot: -num / den,
            d_mass_de: T::of(2.0) * den,
            state,
            dpsi_de,
            dpsi_ds,
        })
    }

    /// ∂²_Eψ and ∂ₛ∂_Eψ, the curvature data the modulation system consumes.
    pub fn second_derivatives(
        &self,
        point: &ManifoldPoint<T>,
    ) -> Result<(Field<T>, Field<T>), GroundError> {
        let lp = self.lplus(&point.state);
        let b = self.sign.as_scalar::<T>();
        let r = self.grid.nodes();
        let psi = point.state.field.u();
        let de = point.dpsi_de.u();
        let ds = point.dpsi_ds.u();
        let dv = self.path.sample_ds(&self.grid, point.state.s);
        let six_b = T::of(6.0) * b;
        let rhs_ee: Vec<T> = (0..psi.len())
            .map(|i| {
                let coupling = six_b * psi[i].re * de[i].re * de[i].re / (r[i] * r[i]);
                -T::of(2.0) * de[i].re - coupling
            })
            .collect();
        let rhs_se: Vec<T> = (0..psi.len())
            .map(|i| {
                let coupling = six_b * psi[i].re * ds[i].re * de[i].re / (r[i] * r[i]);
                -ds[i].re - dv[i] * de[i].re - coupling
            })
            .collect();
        let ee = solve_tridiag(&lp, &rhs_ee)?;
        let se = solve_tridiag(&lp, &rhs_se)?;
        Ok((
            Field::from_real_u(&self.grid, ee)?,
            Field::from_real_u(&self.grid, se)?,
        ))
    }

    /// Find the state with mass η at slow time s by Newton in E.
    pub fn at_mass(
        &self,
        eta: T,
        s: T,
        warm: Option<&GroundState<T>>,
    ) -> Result<GroundState<T>, GroundError> {
        let fail = |detail: String| GroundError::MassTarget {
            eta: eta.to_f64().unwrap_or(f64::NAN),
            detail,
        };
        if eta <= T::zero() {
            return Err(fail("mass must be positive".into()));
        }
        let (mut e, seed_field) = match warm {
            Some(g) => (g.energy, Some(g.field.clone())),
            None => {
                let bs = self.linear_operator(s).bound_state()?;
                let e_lin = -bs.energy;
                let quartic = quartic_integral(&bs.field);
                let guess = e_lin - self.sign.as_scalar::<T>() * eta * quartic;
                (guess, None)
            }
        };
        let mut state = self.stationary(e, s, seed_field.as_ref())?;
        let mut best = state.clone();
        let mut best_gap = (best.mass - eta).abs();
        for _ in 0..24 {
            let gap = state.mass - eta;
            if gap.abs() < best_gap {
                best_gap = gap.abs();
                best = state.clone();
            }
            if best_gap <= eta * T::of(1e-13) {
                break;
            }
            let de_field = self.dpsi_de(&state)?;
            let slope = T::of(2.0) * state.field.inner(&de_field)?.re;
            if slope == T::zero() || !slope.is_finite() {
                return Err(fail(format!(
                    "mass is degenerate in E near E = {:e}",
                    e.to_f64().unwrap_or(f64::NAN)
                )));
            }
            let mut step = -gap / slope;
            // keep Newton from vaulting across the bifurcation point
            let mut advanced = false;
            for _ in 0..30 {
                let trial_e = e + step;
                match self.stationary(trial_e, s, Some(&state.field)) {
                    Ok(next) => {
                        e = trial_e;
                        state = next;
                        advanced = true;
                        break;
                    }
                    Err(_) => step *= T::of(0.5),
                }
            }
            let new_gap = (state.mass - eta).abs();
            // stop on the round-off plateau: further steps just dither
            if !advanced || (new_gap >= best_gap && best_gap <= eta * T::of(1e-9)) {
                if new_gap < best_gap {
                    best = state.clone();
                }
                break;
            }
        }
        if (best.mass - eta).abs() <= eta * T::of(1e-9) {
            Ok(best)
        } else {
            Err(fail(format!(
                "Newton in E left residual {:e}",
                (best.mass - eta).abs().to_f64().unwrap_or(f64::NAN)
            )))
        }
    }

    /// Sample the constant-mass branch at `n_nodes` uniform s values,
    /// continuing the solution from node to node.
    pub fn constant_mass_curve(
        &self,
        eta: T,
        n_nodes: usize,
    ) -> Result<GroundStateCurve<T>, GroundError> {
        assert!(n_nodes >= 2);
        let mut s_vals = Vec::with_capacity(n_nodes);
        let mut states = Vec::with_capacity(n_nodes);
        let mut dpsi_de = Vec::with_capacity(n_nodes);
        let mut dpsi_ds = Vec::with_capacity(n_nodes);
        let mut e_dot = Vec::with_capacity(n_nodes);
        let mut d_mass_de = Vec::with_capacity(n_nodes);
        let mut warm: Option<GroundState<T>> = None;
        for k in 0..n_nodes {
            let s = T::of(k as f64 / (n_nodes - 1) as f64);
            let state = self.at_mass(eta, s, warm.as_ref())?;
            let de = self.dpsi_de(&state)?;
            let ds = self.dpsi_ds(&state)?;
            let num = state.field.inner(&ds)?.re;
            let den = state.field.inner(&de)?.re;
            s_vals.push(s);
            e_dot.push(-num / den);
            d_mass_de.push(T::of(2.0) * den);
            dpsi_de.push(de);
            dpsi_ds.push(ds);
            warm = Some(state.clone());
            states.push(state);
        }
        Ok(GroundStateCurve { eta, s: s_vals, states, dpsi_de, dpsi_ds, e_dot, d_mass_de })
    }

    /// Integrate Ė = −⟨ψ, ∂ₛψ⟩/⟨ψ, ∂_Eψ⟩ by classical RK4: an independent
    /// route to E(s) that never imposes the mass constraint directly.
    pub fn integrate_energy_ode(
        &self,
        e0: T,
        n_steps: usize,
    ) -> Result<Vec<(T, T)>, GroundError> {
        let mut out = Vec::with_capacity(n_steps + 1);
        let mut e = e0;
        let mut s = T::zero();
        let ds = T::one() / T::of(n_steps as f64);
        let mut warm = self.stationary(e0, T::zero(), None)?.field;
        out.push((s, e));
        for _ in 0..n_steps {
            let f = |ee: T, ss: T, seed: &Field<T>| -> Result<(T, Field<T>), GroundError> {
                let p = self.point(ee, ss, Some(seed))?;
                Ok((p.e_dot, p.state.field))
            };
            let half = ds * T::of(0.5);
            let (k1, w1) = f(e, s, &warm)?;
            let (k2, w2) = f(e + half * k1, s + half, &w1)?;
            let (k3, w3) = f(e + half * k2, s + half, &w2)?;
            let (k4, w4) = f(e + ds * k3, s + ds, &w3)?;
            e += ds * (k1 + T::of(2.0) * k2 + T::of(2.0) * k3 + k4) / T::of(6.0);
            s += ds;
            warm = w4;
            out.push((s, e));
        }
        Ok(out)
    }

    /// Default branch mass: the mass at which the nonlinear shift of E away
    /// from the linear bound state is `frac`·E_lin at s = 0.
    pub fn default_eta(&self, frac: T) -> Result<T, GroundError> {
        let bs = self.linear_operator(T::zero()).bound_state()?;
        let e_lin = -bs.energy;
        let target = e_lin - self.sign.as_scalar::<T>() * frac * e_lin;
        let state = self.stationary(target, T::zero(), None)?;
        Ok(state.mass)
    }
}

/// Gross–Pitaevskii energy ∫ ½|∇φ|² + ½V|φ|² + ¼b|φ|⁴, evaluated with the
/// same discrete quadratic form the stationary solver uses, so solutions are
/// exactly critical points under the discrete mass constraint.
pub fn gp_energy<T: Real>(phi: &Field<T>, v: &[T], sign: NonlinSign) -> T {
    let grid = phi.grid();
    let n = grid.n_points();
    assert_eq!(v.len(), n);
    let h = grid.spacing();
    let free = SymTridiag::new(vec![T::of(2.0) / (h * h); n], vec![-T::one() / (h * h); n - 1]);
    let au = free.apply_complex(phi.u());
    let r = grid.nodes();
    let mut kin = T::zero();
    let mut pot = T::zero();
    let mut quart = T::zero();
    for i in 0..n {
        let z = phi.u()[i];
        kin += (z.conj() * au[i]).re;
        let a2 = z.norm_sqr();
        pot += v[i] * a2;
        quart += a2 * a2 / (r[i] * r[i]);
    }
    let w = T::of(4.0) * T::PI() * h;
    w * (T::of(0.5) * kin + T::of(0.5) * pot + T::of(0.25) * sign.as_scalar::<T>() * quart)
}

fn assemble_shifted<T: Real>(grid: &Arc<RadialGrid<T>>, v: &[T], e: T) -> SymTridiag<T> {
    let op = SchrodingerOperator::new(grid, v.to_vec()).expect("finite potential");
    op.matrix().shifted(-e)
}

fn quartic_integral<T: Real>(field: &Field<T>) -> T {
    let grid = field.grid();
    let h = grid.spacing();
    let r = grid.nodes();
    let s = field
        .u()
        .iter()
        .zip(r)
        .fold(T::zero(), |acc, (z, &ri)| {
            let a2 = z.norm_sqr();
            acc + a2 * a2 / (ri * ri)
        });
    T::of(4.0) * T::PI() * h * s
}
