//! Scalar abstractions the wavefunction machinery is generic over.
//!
//! Two layers: [`RealScalar`] covers the floating-point precisions (`f32`,
//! `f64`), and [`Field`] covers the number fields a wavefunction can live in
//! (real or complex over either precision). Concrete aliases for the
//! double-precision instantiations live at the crate root.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, NumCast};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::Neg;

/// Real floating-point scalar: `f32` or `f64`.
///
/// Every real scalar is also the trivial (real) instance of [`Field`] over
/// itself, so chains of `Field<Real = R>` bounds collapse to `R: RealScalar`.
pub trait RealScalar:
    Float
    + FromPrimitive
    + NumAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
    + Field<Real = Self>
{
    /// Lossy conversion from `f64`, panicking only on non-representable input.
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 not representable in this scalar type")
    }

    /// Widening conversion to `f64`.
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).expect("scalar not representable as f64")
    }

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl RealScalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl RealScalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

/// The number field of a wavefunction: real or complex over a [`RealScalar`].
///
/// Everything the ansatz and trainer need is expressed through this trait so
/// the same code path serves real- and complex-weight networks.
pub trait Field:
    Copy
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Neg<Output = Self>
    + NumAssign
    + Sum
{
    type Real: RealScalar;

    /// Whether the field has an imaginary component.
    const COMPLEX: bool;

    fn from_real(re: Self::Real) -> Self;

    /// Build from real components. The imaginary part is ignored by real
    /// fields, where it is identically zero in every use site.
    fn from_components(re: Self::Real, im: Self::Real) -> Self;

    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> Self::Real;
    fn scale(self, s: Self::Real) -> Self;
    fn exp(self) -> Self;
    fn is_finite(self) -> bool;

    /// tanh, stable against overflow for large `|Re z|`.
    fn tanh_stable(self) -> Self;

    /// log cosh z, stable for pre-activations far outside the quadratic
    /// regime. Computed on the half-plane `Re z ≥ 0` (logcosh is even) as
    /// `z − ln 2 + ln(1 + e^{−2z})` with the principal log branch.
    fn logcosh(self) -> Self;

    /// (logcosh z, tanh z) sharing one exponential; the training hot loop
    /// needs both per hidden unit.
    fn logcosh_tanh(self) -> (Self, Self);

    /// One draw per real component from N(0, sigma²).
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, sigma: Self::Real) -> Self;
}

macro_rules! impl_field_for_real {
    ($t:ty) => {
        impl Field for $t {
            type Real = $t;
            const COMPLEX: bool = false;

            fn from_real(re: Self::Real) -> Self {
                re
            }
            fn from_components(re: Self::Real, _im: Self::Real) -> Self {
                re
            }
            fn re(self) -> Self::Real {
                self
            }
            fn im(self) -> Self::Real {
                0.0
            }
            fn conj(self) -> Self {
                self
            }
            fn norm_sqr(self) -> Self::Real {
                self * self
            }
            fn scale(self, s: Self::Real) -> Self {
                self * s
            }
            fn exp(self) -> Self {
                Float::exp(self)
            }
            fn is_finite(self) -> bool {
                Float::is_finite(self)
            }
            fn tanh_stable(self) -> Self {
                Float::tanh(self)
            }
            fn logcosh(self) -> Self {
                let a = Float::abs(self);
                a - Self::Real::of(std::f64::consts::LN_2) + Float::exp(-(a + a)).ln_1p()
            }
            fn logcosh_tanh(self) -> (Self, Self) {
                let a = Float::abs(self);
                let w = Float::exp(-(a + a));
                let lc = a - Self::Real::of(std::f64::consts::LN_2) + w.ln_1p();
                let t = (1.0 - w) / (1.0 + w);
                (lc, if self < 0.0 { -t } else { t })
            }
            fn sample_normal<R: Rng + ?Sized>(rng: &mut R, sigma: Self::Real) -> Self {
                Self::standard_normal(rng) * sigma
            }
        }
    };
}

impl_field_for_real!(f32);
impl_field_for_real!(f64);

impl<T: RealScalar> Field for Complex<T> {
    type Real = T;
    const COMPLEX: bool = true;

    fn from_real(re: T) -> Self {
        Complex::new(re, T::zero())
    }
    fn from_components(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
    fn re(self) -> T {
        self.re
    }
    fn im(self) -> T {
        self.im
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    fn scale(self, s: T) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    fn exp(self) -> Self {
        Complex::exp(self)
    }
    fn is_finite(self) -> bool {
        Float::is_finite(self.re) && Float::is_finite(self.im)
    }
    fn tanh_stable(self) -> Self {
        // tanh is odd; reduce to Re z ≥ 0 where |e^{−2z}| ≤ 1.
        let neg = self.re < T::zero();
        let zp = if neg { -self } else { self };
        let w = Complex::exp(-(zp + zp));
        let one = Complex::new(T::one(), T::zero());
        let t = (one - w) / (one + w);
        if neg {
            -t
        } else {
            t
        }
    }
    fn logcosh(self) -> Self {
        // Even: reduce to Re z ≥ 0, then z − ln 2 + ln(1 + e^{−2z}).
        let zp = if self.re < T::zero() { -self } else { self };
        let w = Complex::exp(-(zp + zp));
        let one = Complex::new(T::one(), T::zero());
        zp - Complex::new(T::of(std::f64::consts::LN_2), T::zero()) + Complex::ln(one + w)
    }
    fn logcosh_tanh(self) -> (Self, Self) {
        let neg = self.re < T::zero();
        let zp = if neg { -self } else { self };
        let w = Complex::exp(-(zp + zp));
        let one = Complex::new(T::one(), T::zero());
        let lc = zp - Complex::new(T::of(std::f64::consts::LN_2), T::zero()) + Complex::ln(one + w);
        let t = (one - w) / (one + w);
        (lc, if neg { -t } else { t })
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, sigma: T) -> Self {
        let re = T::standard_normal(rng) * sigma;
        let im = T::standard_normal(rng) * sigma;
        Complex::new(re, im)
    }
}

/// Tag naming the number field in file layouts and manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

impl FieldKind {
    pub fn of<F: Field>() -> Self {
        if F::COMPLEX {
            FieldKind::Complex
        } else {
            FieldKind::Real
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Real => write!(f, "real"),
            FieldKind::Complex => write!(f, "complex"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C64 = Complex<f64>;

    #[test]
    fn logcosh_matches_naive_in_moderate_range() {
        for &x in &[-5.0, -1.3, -0.2, 0.0, 0.4, 2.7, 6.0_f64] {
            assert_relative_eq!(
                Field::logcosh(x),
                x.cosh().ln(),
                max_relative = 1e-14,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn logcosh_stable_for_huge_preactivations() {
        // cosh overflows near 710; the stable form must not.
        for &x in &[50.0, 710.0, 1e3, -1e3_f64] {
            let v = Field::logcosh(x);
            assert!(v.is_finite());
            assert_relative_eq!(v, x.abs() - std::f64::consts::LN_2, max_relative = 1e-15);
        }
        let z = C64::new(1e3, 0.7);
        let v = Field::logcosh(z);
        assert!(Field::is_finite(v));
        assert_relative_eq!(v.re, 1e3 - std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn complex_logcosh_matches_direct_formula() {
        let z = C64::new(0.3, -0.8);
        let direct = Complex::ln(Complex::cosh(z));
        let stable = Field::logcosh(z);
        assert_relative_eq!(stable.re, direct.re, epsilon = 1e-14);
        assert_relative_eq!(stable.im, direct.im, epsilon = 1e-14);
    }

    #[test]
    fn logcosh_is_even() {
        let z = C64::new(-2.1, 1.4);
        let a = Field::logcosh(z);
        let b = Field::logcosh(-z);
        assert_relative_eq!(a.re, b.re, epsilon = 1e-14);
        assert_relative_eq!(a.im, b.im, epsilon = 1e-14);
    }

    #[test]
    fn tanh_stable_matches_library_and_survives_overflow_range() {
        let z = C64::new(0.4, -1.1);
        let lib = Complex::tanh(z);
        let ours = Field::tanh_stable(z);
        assert_relative_eq!(ours.re, lib.re, epsilon = 1e-14);
        assert_relative_eq!(ours.im, lib.im, epsilon = 1e-14);

        let big = C64::new(900.0, 0.3);
        let t = Field::tanh_stable(big);
        assert!(Field::is_finite(t));
        assert_relative_eq!(t.re, 1.0, epsilon = 1e-14);

        let big_neg = C64::new(-900.0, 0.3);
        let t = Field::tanh_stable(big_neg);
        assert_relative_eq!(t.re, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn sample_normal_draws_are_deterministic_per_seed() {
        use rand::SeedableRng;
        let mut a = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        let mut b = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        let x: C64 = Field::sample_normal(&mut a, 0.01);
        let y: C64 = Field::sample_normal(&mut b, 0.01);
        assert_eq!(x, y);
    }
}
