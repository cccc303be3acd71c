//! Linearization of the Gross–Pitaevskii flow about a manifold point ψ_{E,s}.
//!
//! Writing the solution as (ψ + φ₁ + iφ₂)·(phase), the fluctuation pair obeys
//! ε∂ₛ(φ₁, φ₂) = L(φ₁, φ₂) + … with the real-linear block operator
//! L = [[0, L⁻], [−L⁺, 0]], L⁺ = −Δ + V + E + 3bψ², L⁻ = −Δ + V + E + bψ².
//! L has the Jordan chain L(0, ψ) = 0, L(−∂_Eψ, 0) = −(0, ψ); the Riesz
//! projector P^d onto that generalized kernel, its complement P^c, and an L⁻¹
//! restricted to the P^c range are what the modulation theory consumes.

use crate::grid::{DomainError, Field, NormKind, PairField};
use crate::ground::{GroundError, GroundState, Manifold};
use crate::scalar::Real;
use crate::tridiag::{BorderedTridiag, SymTridiag, TridiagError};
use crate::NonlinSign;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinearizedError {
    #[error("right-hand side has a generalized-kernel component of relative size {defect:e}")]
    RhsNotInRange { defect: f64 },
    #[error("constrained solve is ill-conditioned (estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerical(#[from] TridiagError),
}

const COND_LIMIT: f64 = 1e12;
const RANGE_DEFECT_LIMIT: f64 = 1e-8;

/// L, its projectors, and the constrained inverse at one manifold point.
pub struct Linearization<T: Real> {
    pub state: GroundState<T>,
    pub dpsi_de: Field<T>,
    pub lplus: SymTridiag<T>,
    pub lminus: SymTridiag<T>,
    /// ⟨ψ, ∂_Eψ⟩; its distance from zero is the branch nondegeneracy.
    pub pairing: T,
    solve_plus: BorderedTridiag<T>,
    solve_minus: BorderedTridiag<T>,
}

impl<T: Real> Linearization<T> {
    pub fn new(manifold: &Manifold<T>, state: GroundState<T>) -> Result<Self, LinearizedError> {
        let dpsi_de = manifold.dpsi_de(&state)?;
        let lplus = manifold.lplus(&state);
        let lminus = manifold.lminus(&state);
        let pairing = state.field.inner(&dpsi_de)?.re;
        let psi_u: Vec<T> = state.field.u().iter().map(|z| z.re).collect();
        let de_u: Vec<T> = dpsi_de.u().iter().map(|z| z.re).collect();
        let solve_plus = BorderedTridiag::factor(&lplus, &psi_u)?;
        let solve_minus = BorderedTridiag::factor(&lminus, &de_u)?;
        for (factor, name) in [(&solve_plus, "L+"), (&solve_minus, "L-")] {
            let cond = factor.cond_estimate().to_f64().unwrap_or(f64::INFINITY);
            if cond > COND_LIMIT {
                let _ = name;
                return Err(LinearizedError::IllConditioned { cond });
            }
        }
        Ok(Self { state, dpsi_de, lplus, lminus, pairing, solve_plus, solve_minus })
    }

    pub fn sign(&self) -> NonlinSign {
        self.state.sign
    }

    /// L v = (L⁻v₂, −L⁺v₁).
    pub fn apply(&self, v: &PairField<T>) -> PairField<T> {
        let grid = self.state.field.grid();
        let v1 = v.re.u_re();
        let v2 = v.im.u_re();
        let lp = self.lplus.apply(&v1);
        let lm = self.lminus.apply(&v2);
        PairField {
            re: Field::from_real_u(grid, lm).expect("finite"),
            im: Field::from_real_u(grid, lp.iter().map(|&x| -x).collect()).expect("finite"),
        }
    }

    /// Riesz projector onto the generalized kernel:
    /// P^d v = (⟨ψ, v₁⟩(∂_Eψ, 0) + ⟨∂_Eψ, v₂⟩(0, ψ)) / ⟨ψ, ∂_Eψ⟩.
    pub fn project_discrete(&self, v: &PairField<T>) -> PairField<T> {
        let a = self.state.field.inner(&v.re).expect("same grid").re / self.pairing;
        let b = self.dpsi_de.inner(&v.im).expect("same grid").re / self.pairing;
        PairField {
            re: self.dpsi_de.scale_re(a),
            im: self.state.field.scale_re(b),
        }
    }

    pub fn project_continuous(&self, v: &PairField<T>) -> PairField<T> {
        v.sub(&self.project_discrete(v))
    }

    /// Residuals of the Jordan-chain identities ‖L(0,ψ)‖ and
    /// ‖L(−∂_Eψ,0)+(0,ψ)‖, both in the pair L² norm.
    pub fn kernel_residuals(&self) -> (T, T) {
        let grid = self.state.field.grid();
        let zero = Field::zero(grid);
        let k1 = PairField { re: zero.clone(), im: self.state.field.clone() };
        let r1 = self.apply(&k1).norm(NormKind::L2).expect("norm");
        let k2 = PairField { re: self.dpsi_de.scale_re(-T::one()), im: zero };
        let chain = self.apply(&k2).add(&PairField {
            re: Field::zero(grid),
            im: self.state.field.clone(),
        });
        let r2 = chain.norm(NormKind::L2).expect("norm");
        (r1, r2)
    }

    /// Solve L w = rhs for the unique w with P^d w = 0, given rhs in the range
    /// of P^c. Component form: L⁺w₁ = −rhs₂ with ⟨ψ, w₁⟩ = 0, and
    /// L⁻w₂ = rhs₁ with ⟨∂_Eψ, w₂⟩ = 0, each solved through a bordered
    /// factorization whose multiplier absorbs round-off incompatibility.
    pub fn solve_on_range(&self, rhs: &PairField<T>) -> Result<PairField<T>, LinearizedError> {
        let rhs_norm = rhs.norm(NormKind::L2)?;
        let defect = self.project_discrete(rhs).norm(NormKind::L2)?;
        let rel = (defect / rhs_norm.max(T::min_positive_value()))
            .to_f64()
            .unwrap_or(f64::INFINITY);
        if rel > RANGE_DEFECT_LIMIT {
            return Err(LinearizedError::RhsNotInRange { defect: rel });
        }
        let grid = self.state.field.grid();
        let r1 = rhs.re.u_re();
        let r2: Vec<T> = rhs.im.u().iter().map(|z| -z.re).collect();
        let (w1, _) = self.solve_plus.solve(&r2, T::zero());
        let (w2, _) = self.solve_minus.solve(&r1, T::zero());
        Ok(PairField {
            re: Field::from_real_u(grid, w1)?,
            im: Field::from_real_u(grid, w2)?,
        })
    }

    /// Quadratic-and-higher remainder of the nonlinearity about ψ, in pair
    /// form N = J R; see [`nonlinearity_about`].
    pub fn nonlinearity(&self, phi: &PairField<T>) -> PairField<T> {
        nonlinearity_about(&self.state, phi)
    }
}

/// N(ψ⃗, φ⃗) = J R, the quadratic-and-higher part of the cubic term about ψ:
///   R₁ = b ψ |φ|² + 2 b ψ φ₁² + b |φ|² φ₁,
///   R₂ = 2 b ψ φ₁ φ₂ + b |φ|² φ₂.
pub fn nonlinearity_about<T: Real>(
    state: &GroundState<T>,
    phi: &PairField<T>,
) -> PairField<T> {
    let grid = state.field.grid();
    let b = state.sign.as_scalar::<T>();
    let r = grid.nodes();
    let psi = state.field.u();
    let p1 = phi.re.u();
    let p2 = phi.im.u();
    let n = grid.n_points();
    let mut n1 = Vec::with_capacity(n);
    let mut n2 = Vec::with_capacity(n);
    for i in 0..n {
        // u-representation: ψφ² carries 1/r², φ³ carries 1/r²
        let rr = r[i] * r[i];
        let (up, u1, u2) = (psi[i].re, p1[i].re, p2[i].re);
        let abs2 = u1 * u1 + u2 * u2;
        let r1 = (b * up * abs2 + T::of(2.0) * b * up * u1 * u1 + b * abs2 * u1) / rr;
        let r2 = (T::of(2.0) * b * up * u1 * u2 + b * abs2 * u2) / rr;
        n1.push(-r2);
        n2.push(r1);
    }
    PairField {
        re: Field::from_real_u(grid, n1).expect("finite"),
        im: Field::from_real_u(grid, n2).expect("finite"),
    }
}

/// Diagonal multipliers (a⁺, a⁻) with L_a − L_b = J∘diag(a⁺, a⁻): the
/// difference of two linearizations is a pure multiplication operator, and it
/// inherits the spatial decay of V_a − V_b and ψ_a² − ψ_b².
pub fn linearization_difference<T: Real>(
    a: &Linearization<T>,
    b: &Linearization<T>,
) -> (Vec<T>, Vec<T>) {
    let plus = a
        .lplus
        .diag
        .iter()
        .zip(&b.lplus.diag)
        .map(|(&x, &y)| x - y)
        .collect();
    let minus = a
        .lminus
        .diag
        .iter()
        .zip(&b.lminus.diag)
        .map(|(&x, &y)| x - y)
        .collect();
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::potential::{PotentialPath, Quadratic};
    use crate::synth;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup(sign: NonlinSign) -> (Manifold<f64>, Linearization<f64>) {
        let grid: Arc<RadialGrid<f64>> = RadialGrid::new(32.0, 640).unwrap();
        let path = PotentialPath::new(
            Quadratic { c0: 1.4, c1: 0.12, c2: -0.06 },
            Quadratic { c0: 2.0, c1: 0.05, c2: 0.0 },
        );
        let m = Manifold::new(&grid, path, sign);
        let e_lin = -m.linear_operator(0.3).bound_state().unwrap().energy;
        let e = match sign {
            NonlinSign::Defocusing => 0.85 * e_lin,
            NonlinSign::Focusing => 1.15 * e_lin,
        };
        let state = m.stationary(e, 0.3, None).unwrap();
        let lin = Linearization::new(&m, state).unwrap();
        (m, lin)
    }

    fn random_pair(
        lin: &Linearization<f64>,
        rng: &mut ChaCha8Rng,
    ) -> PairField<f64> {
        let grid = lin.state.field.grid();
        PairField {
            re: synth::random_smooth_field(grid, rng, 9),
            im: synth::random_smooth_field(grid, rng, 9),
        }
    }

    #[test]
    fn jordan_chain_residuals_vanish() {
        for sign in [NonlinSign::Defocusing, NonlinSign::Focusing] {
            let (_, lin) = setup(sign);
            let (r1, r2) = lin.kernel_residuals();
            let h = lin.state.field.grid().spacing();
            let scale = 1.0 / (h * h);
            assert!(r1 < 1e-10 * scale, "{sign}: L(0,psi) residual {r1}");
            assert!(r2 < 1e-10 * scale, "{sign}: chain residual {r2}");
        }
    }

    #[test]
    fn negative_directions_of_lplus_follow_the_sign() {
        let (_, defoc) = setup(NonlinSign::Defocusing);
        assert_eq!(defoc.lplus.count_below(0.0), 0);
        assert_eq!(defoc.lminus.count_below(-1e-9), 0);
        let lowest_lm = defoc.lminus.eigenvalue(0);
        assert!(lowest_lm.abs() < 1e-8, "L- kernel eigenvalue {lowest_lm}");
        let (_, foc) = setup(NonlinSign::Focusing);
        assert_eq!(foc.lplus.count_below(0.0), 1);
        assert_eq!(foc.lminus.count_below(-1e-9), 0);
    }

    #[test]
    fn pairing_sign_tracks_the_mass_slope() {
        let (_, defoc) = setup(NonlinSign::Defocusing);
        assert!(defoc.pairing < 0.0);
        let (_, foc) = setup(NonlinSign::Focusing);
        assert!(foc.pairing > 0.0);
    }

    #[test]
    fn riesz_projector_is_idempotent_and_commutes_with_l() {
        let (_, lin) = setup(NonlinSign::Defocusing);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let v = random_pair(&lin, &mut rng);
            let pd = lin.project_discrete(&v);
            let pdd = lin.project_discrete(&pd);
            assert!(pdd.sub(&pd).norm(NormKind::L2).unwrap() < 1e-12);
            let pc = lin.project_continuous(&v);
            assert!(
                lin.project_discrete(&pc).norm(NormKind::L2).unwrap()
                    < 1e-11 * v.norm(NormKind::L2).unwrap()
            );
            // commutation P^d L = L P^d
            let a = lin.project_discrete(&lin.apply(&v));
            let b = lin.apply(&lin.project_discrete(&v));
            let h = lin.state.field.grid().spacing();
            assert!(
                a.sub(&b).norm(NormKind::L2).unwrap()
                    < 1e-9 / (h * h) * v.norm(NormKind::L2).unwrap()
            );
        }
    }

    #[test]
    fn projector_fixes_the_kernel_and_kills_nothing_else_twice() {
        let (_, lin) = setup(NonlinSign::Defocusing);
        let grid = lin.state.field.grid();
        let zero = Field::zero(grid);
        let k1 = PairField { re: lin.dpsi_de.clone(), im: zero.clone() };
        let p1 = lin.project_discrete(&k1);
        assert!(p1.sub(&k1).norm(NormKind::L2).unwrap() < 1e-12);
        let k2 = PairField { re: zero, im: lin.state.field.clone() };
        let p2 = lin.project_discrete(&k2);
        assert!(p2.sub(&k2).norm(NormKind::L2).unwrap() < 1e-12);
    }

    #[test]
    fn constrained_inverse_solves_l_on_its_range() {
        for sign in [NonlinSign::Defocusing, NonlinSign::Focusing] {
            let (_, lin) = setup(sign);
            let mut rng = ChaCha8Rng::seed_from_u64(33);
            for _ in 0..4 {
                let z = random_pair(&lin, &mut rng);
                let rhs = lin.apply(&lin.project_continuous(&z));
                let rhs = lin.project_continuous(&rhs);
                let w = lin.solve_on_range(&rhs).unwrap();
                let back = lin.apply(&w);
                let err = back.sub(&rhs).norm(NormKind::L2).unwrap();
                let h = lin.state.field.grid().spacing();
                let scale = rhs.norm(NormKind::L2).unwrap() / (h * h);
                assert!(err < 1e-10 * scale, "{sign}: inverse residual {err}");
                let pd = lin.project_discrete(&w).norm(NormKind::L2).unwrap();
                assert!(pd < 1e-9 * w.norm(NormKind::L2).unwrap(), "{sign}: pd {pd}");
            }
        }
    }

    #[test]
    fn kernel_contaminated_rhs_is_rejected() {
        let (_, lin) = setup(NonlinSign::Defocusing);
        let grid = lin.state.field.grid();
        let rhs = PairField {
            re: lin.state.field.clone(),
            im: Field::zero(grid),
        };
        assert!(matches!(
            lin.solve_on_range(&rhs),
            Err(LinearizedError::RhsNotInRange { .. })
        ));
    }

    #[test]
    fn nonlinearity_matches_complex_expansion_oracle() {
        let (_, lin) = setup(NonlinSign::Defocusing);
        let grid = lin.state.field.grid().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let phi = random_pair(&lin, &mut rng);
        let scaled = phi.scale_re(0.1);
        let n_pair = lin.nonlinearity(&scaled);
        // oracle: complex cubic minus its linearization, done in ψ-space
        let b = 1.0;
        let psi = lin.state.field.psi();
        let p = scaled.to_complex().psi();
        let oracle_c: Vec<Complex<f64>> = psi
            .iter()
            .zip(&p)
            .map(|(&s, &f)| {
                let full = (s + f) * (s + f).norm_sqr() * b;
                let lin_term = b * s.re * s.re * Complex::new(3.0 * f.re, f.im);
                full - b * s * s * s - lin_term
            })
            .collect();
        // N = J R: N₁ = −Im(R), N₂ = Re(R)
        let r = grid.nodes();
        for (i, &rc) in oracle_c.iter().enumerate() {
            let n1 = n_pair.re.u()[i].re / r[i];
            let n2 = n_pair.im.u()[i].re / r[i];
            assert_relative_eq!(n1, -rc.im, epsilon = 1e-13, max_relative = 1e-10);
            assert_relative_eq!(n2, rc.re, epsilon = 1e-13, max_relative = 1e-10);
        }
    }

    #[test]
    fn nonlinearity_is_quadratically_small() {
        let (_, lin) = setup(NonlinSign::Focusing);
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let phi = random_pair(&lin, &mut rng);
        let n1 = lin.nonlinearity(&phi.scale_re(1e-3)).norm(NormKind::L2).unwrap();
        let n2 = lin.nonlinearity(&phi.scale_re(2e-3)).norm(NormKind::L2).unwrap();
        let order = (n2 / n1).log2();
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }

    #[test]
    fn linearization_difference_is_a_decaying_multiplier() {
        let grid: Arc<RadialGrid<f64>> = RadialGrid::new(32.0, 640).unwrap();
        let path = PotentialPath::new(
            Quadratic { c0: 1.4, c1: 0.12, c2: -0.06 },
            Quadratic::constant(2.0),
        );
        let m = Manifold::new(&grid, path, NonlinSign::Defocusing);
        let e_lin = -m.linear_operator(0.0).bound_state().unwrap().energy;
        let e = 0.85 * e_lin;
        let la = Linearization::new(&m, m.stationary(e, 0.0, None).unwrap()).unwrap();
        let lb = Linearization::new(&m, m.stationary(e, 0.8, None).unwrap()).unwrap();
        let (dp, dm) = linearization_difference(&la, &lb);
        let peak = dp.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(peak > 1e-3);
        // same E: the difference decays with r like the well and the profiles
        let tail_p = dp[600..].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let tail_m = dm[600..].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        assert!(tail_p < 1e-8 * peak, "tail {tail_p} vs peak {peak}");
        assert!(tail_m < 1e-8 * peak);
    }
}
