//! Closed-form barrier certificates for the `mu < 0` regime.
//!
//! For `mu < 0`, `eps != 0` with `4|mu||eps| < 1`, the quadratic
//! `mu*a^2 + a - |eps|` has roots `0 < a2 < a1` and
//! `mu*b^2 + b + |eps|` has roots `b2 < 0 < b1`, ordered
//! `b2 < 0 < a2 < a1 < b1`. Any constant `r` in `[a2, a1]` is a lower
//! solution and any constant `R >= b1` an upper solution, because the
//! worst cases over `s` of the field sign conditions are
//! `r + mu*r^2 - |eps| >= 0` and `R + mu*R^2 + |eps| <= 0`.
//! The `mu > 0` regime is handled exclusively through
//! [`ProblemParams::reflect`] and this module; there is no second code path.

use crate::error::Error;
use crate::model::ProblemParams;
use crate::{real, Real};

/// Tolerance on the worst-case sign values a certificate must meet.
pub const SIGN_TOLERANCE: f64 = 1e-10;

/// The computed barrier data: roots of the two auxiliary quadratics, the
/// chosen bracket `[lower, upper]`, and the discriminants.
///
/// Invariants established by [`compute_barriers`]:
/// `b2 < 0 < a2 <= lower <= a1 < b1 <= upper` and `disc_a = 1 - 4|mu||eps|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCertificate<T: Real> {
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    /// Chosen lower barrier constant `r` (defaults to `a2`).
    pub lower: T,
    /// Chosen upper barrier constant `R` (defaults to `b1`).
    pub upper: T,
    pub disc_a: T,
    pub disc_b: T,
}

/// The interval a solve is bracketed and guarded by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T: Real> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Bracket<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }
}

impl<T: Real> BarrierCertificate<T> {
    pub fn bracket(&self) -> Bracket<T> {
        Bracket::new(self.lower, self.upper)
    }
}

/// Worst-case values (over `s`) of the two barrier inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSignReport<T: Real> {
    /// `r + mu*r^2 - |eps|`; certified when `>= -1e-10`.
    pub worst_lower: T,
    /// `R + mu*R^2 + |eps|`; certified when `<= 1e-10`.
    pub worst_upper: T,
}

impl<T: Real> BarrierSignReport<T> {
    pub fn lower_certified(&self) -> bool {
        self.worst_lower >= -real::<T>(SIGN_TOLERANCE)
    }

    pub fn upper_certified(&self) -> bool {
        self.worst_upper <= real::<T>(SIGN_TOLERANCE)
    }

    pub fn certified(&self) -> bool {
        self.lower_certified() && self.upper_certified()
    }
}

/// Strict existence condition `4|mu||eps| < 1`.
pub fn resonance_condition<T: Real>(params: &ProblemParams<T>) -> bool {
    resonance_product(params) < T::one()
}

/// The product `4|mu||eps|` the condition is stated on.
pub fn resonance_product<T: Real>(params: &ProblemParams<T>) -> T {
    real::<T>(4.0) * params.mu().abs() * params.epsilon().abs()
}

/// Both real roots of `a*x^2 + b*x + c`, ascending.
///
/// Uses the cancellation-safe form `q = -(b + sign(b)*sqrt(D))/2` with
/// roots `q/a` and `c/q`; the naive formula loses every digit of the small
/// root exactly in the small-forcing regime where `a2 -> 0`.
pub fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Result<(T, T), Error<T>> {
    debug_assert!(a != T::zero());
    let disc = b * b - real::<T>(4.0) * a * c;
    if disc <= T::zero() {
        return Err(Error::DegenerateDiscriminant { discriminant: disc });
    }
    let sqrt_disc = disc.sqrt();
    let q = -(b + sqrt_disc.copysign(b)) / real::<T>(2.0);
    let (x1, x2) = (q / a, c / q);
    Ok(if x1 <= x2 { (x1, x2) } else { (x2, x1) })
}

/// Builds the certificate for a `mu < 0` problem, with optional bracket
/// overrides validated against `[a2, a1]` and `[b1, inf)`.
pub fn compute_barriers<T: Real>(
    params: &ProblemParams<T>,
    r_choice: Option<T>,
    upper_choice: Option<T>,
) -> Result<BarrierCertificate<T>, Error<T>> {
    if params.mu() >= T::zero() {
        return Err(Error::WrongSignCase { mu: params.mu() });
    }
    if params.epsilon() == T::zero() {
        return Err(Error::InvalidParams {
            reason: "barrier certificate needs epsilon != 0".into(),
        });
    }
    if !resonance_condition(params) {
        return Err(Error::ResonanceConditionViolated {
            product: resonance_product(params),
        });
    }

    let mu = params.mu();
    let eps_abs = params.epsilon().abs();
    let (a2, a1) = quadratic_roots(mu, T::one(), -eps_abs)?;
    let (b2, b1) = quadratic_roots(mu, T::one(), eps_abs)?;
    let disc_a = T::one() - real::<T>(4.0) * mu * (-eps_abs);
    let disc_b = T::one() - real::<T>(4.0) * mu * eps_abs;
    debug_assert!(b2 < T::zero() && T::zero() < a2 && a2 < a1 && a1 < b1);

    let lower = match r_choice {
        Some(r) if r < a2 || r > a1 => {
            return Err(Error::InvalidBracketChoice {
                which: "r",
                value: r,
                lo: a2,
                hi: a1,
            })
        }
        Some(r) => r,
        None => a2,
    };
    let upper = match upper_choice {
        Some(big_r) if big_r < b1 => {
            return Err(Error::InvalidBracketChoice {
                which: "R",
                value: big_r,
                lo: b1,
                hi: T::infinity(),
            })
        }
        Some(big_r) => big_r,
        None => b1,
    };

    Ok(BarrierCertificate {
        a1,
        a2,
        b1,
        b2,
        lower,
        upper,
        disc_a,
        disc_b,
    })
}

/// Evaluates the `s`-independent worst cases of both barrier inequalities
/// for the certificate's bracket. A failing certificate is a reported
/// outcome, not an error.
pub fn verify_barrier_signs<T: Real>(
    cert: &BarrierCertificate<T>,
    params: &ProblemParams<T>,
) -> BarrierSignReport<T> {
    let mu = params.mu();
    let eps_abs = params.epsilon().abs();
    let (r, big_r) = (cert.lower, cert.upper);
    BarrierSignReport {
        worst_lower: r + mu * r * r - eps_abs,
        worst_upper: big_r + mu * big_r * big_r + eps_abs,
    }
}
