//! Secret-key capacity of fast-fading MIMO wiretap channels.
//!
//! A source talks to a destination over a fading MIMO channel while an
//! eavesdropper listens through a second, independently fading MIMO channel
//! with a gain advantage `alpha2`. Source and destination may also talk over
//! an authenticated public channel that the eavesdropper hears in full. This
//! crate evaluates how many secret key bits per channel use the two parties
//! can distill in that setting, and provides:
//!
//! - [`linalg`]: small dense complex Hermitian primitives (Cholesky
//!   log-determinant, Schur complement, orthogonal-complement projection,
//!   Jacobi SVD) — no external linear-algebra dependency.
//! - [`channel`]: scenario configuration and counter-based, reproducible
//!   sampling of the two channel matrices.
//! - [`capacity`]: the per-sample key-rate integrand by two independent
//!   algebraic routes, Monte Carlo aggregation, and sweep curves.
//! - [`allocation`]: transmit power allocation across source antennas;
//!   numeric verification that the uniform allocation is optimal and that
//!   the objective is midpoint-concave.
//! - [`asymptotics`]: high-power limits, the large-antenna closed form, the
//!   large-eavesdropper-gain limit, and the SVD decomposition that splits
//!   the integrand into a power-limited and an interference-limited part.
//! - [`protocol`]: a desk-scale finite-alphabet quantize-and-bin secret
//!   sharing protocol with measured key disagreement and leakage.
//!
//! All internal computation is in natural-log units; conversion to bits
//! happens only at reporting boundaries.
//!
//! # Reproducibility
//!
//! Every randomized quantity is a pure function of a [`channel::SeedSpec`]
//! and a sample index. Estimates are bitwise independent of worker count.
//!
//! # Example
//!
//! ```
//! use keycap_core::channel::{ChannelConfig, SeedSpec};
//! use keycap_core::capacity::estimate_capacity;
//!
//! // 2x2 main channel, 2-antenna eavesdropper with no gain advantage,
//! // transmit SNR 10 dB.
//! let cfg = ChannelConfig {
//!     m_s: 2, m_d: 2, m_w: 2,
//!     power: 10.0, sigma2_d: 1.0, sigma2_w: 1.0, alpha2: 1.0,
//! };
//! let seed = SeedSpec::new(42, "demo");
//! let est = estimate_capacity(&cfg, 2000, &seed, 1).unwrap();
//! assert!(est.mean_bits > 0.0);
//! ```

pub mod allocation;
pub mod asymptotics;
pub mod capacity;
pub mod channel;
pub mod linalg;
pub mod mc;
pub mod protocol;
pub mod rng;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the linear-algebra kernel is generic over.
///
/// Implemented by `f32` and `f64`. Everything above the kernel (sampling,
/// Monte Carlo, the protocol) is pinned to `f64` through the aliases below so
/// that bit-exact reproducibility claims are meaningful.
pub trait RealScalar:
    Float + FromPrimitive + NumAssign + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> RealScalar for T where
    T: Float
        + FromPrimitive
        + NumAssign
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Scalar used by all concrete estimators.
pub type Real = f64;
/// Complex scalar used by all concrete estimators.
pub type Complex = num_complex::Complex<Real>;
/// Dense complex matrix over [`Real`].
pub type Matrix = linalg::ComplexMatrix<Real>;
/// Hermitian matrix over [`Real`].
pub type Hermitian = linalg::HermitianMatrix<Real>;

/// Natural log of 2; the single conversion constant between nats and bits.
pub const LN_2: Real = std::f64::consts::LN_2;
