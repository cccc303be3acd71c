//! Numerical laboratory for the radial non-autonomous Gross-Pitaevskii equation
//!
//!   i ε ∂_s Ψ = −ΔΨ + V_s Ψ + b |Ψ|² Ψ,   b = ±1,   s ∈ [0, 1],
//!
//! on a truncated radial grid. The crate builds the ground-state manifold of the
//! stationary problem, the linearized operator with its Riesz spectral projectors,
//! a stiff-safe time integrator for the PDE, and the modulation decomposition that
//! tracks a trajectory against the manifold. Everything is generic over the scalar
//! type; `f64` aliases are exported at the crate root.
//!
//! Fields are stored in the u-representation u(r) = r·ψ(r), which turns the 3-D
//! radial Laplacian into a plain second derivative with Dirichlet ends and every
//! operator in sight into a symmetric tridiagonal matrix.

pub mod evolve;
pub mod fitting;
pub mod grid;
pub mod ground;
pub mod linearized;
pub mod modulation;
pub mod potential;
pub mod scalar;
pub mod spectra;
pub mod synth;
pub mod tridiag;

pub use evolve::{evolve, EvolutionConfig, Integrator, Trajectory};
pub use grid::{Field, NormKind, PairField, RadialGrid};
pub use ground::{gp_energy, GroundState, GroundStateCurve, Manifold};
pub use linearized::Linearization;
pub use modulation::{shadow_decompose, ModulationFit, ModulationTrace};
pub use potential::{PotentialPath, Quadratic};
pub use scalar::Real;
pub use spectra::{BoundState, SchrodingerOperator};

/// Sign of the cubic nonlinearity: `b = +1` defocusing, `b = −1` focusing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonlinSign {
    Defocusing,
    Focusing,
}

impl NonlinSign {
    pub fn as_scalar<T: Real>(self) -> T {
        match self {
            NonlinSign::Defocusing => T::one(),
            NonlinSign::Focusing => -T::one(),
        }
    }

    pub fn from_i8(b: i8) -> Option<Self> {
        match b {
            1 => Some(NonlinSign::Defocusing),
            -1 => Some(NonlinSign::Focusing),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            NonlinSign::Defocusing => 1,
            NonlinSign::Focusing => -1,
        }
    }
}

impl std::fmt::Display for NonlinSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

pub type Grid64 = RadialGrid<f64>;
pub type Field64 = Field<f64>;
pub type PairField64 = PairField<f64>;
pub type BoundState64 = BoundState<f64>;
pub type GroundState64 = ground::GroundState<f64>;
pub type GroundStateCurve64 = ground::GroundStateCurve<f64>;
