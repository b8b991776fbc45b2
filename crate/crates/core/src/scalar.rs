//! Complex scalars behind the two arithmetic backends.
//!
//! Everything downstream is generic over [`Scalar`], which has exactly two
//! implementations: `Complex<f64>` (the float backend, binary64 components)
//! and `Complex<BigRational>` (the exact backend, Gaussian rationals with
//! arbitrary-precision components).  Exact arithmetic is error-free; float
//! comparisons always go through an explicit tolerance parameter — there is
//! no hidden epsilon anywhere in this crate.

use std::fmt;

use num::bigint::BigInt;
use num::complex::Complex;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigRational;

/// Float backend scalar: a complex number with binary64 components.
pub type FloatScalar = Complex<f64>;

/// Exact backend scalar: a Gaussian rational with arbitrary-precision
/// rational components.
pub type ExactScalar = Complex<BigRational>;

/// A complex scalar usable as a matrix entry.
///
/// `EXACT` advertises whether arithmetic is error-free.  Generic code
/// branches on it to pick exact zero tests versus tolerance comparisons,
/// mirroring how the two backends are meant to be driven.
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// True when arithmetic in this backend is error-free.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    /// Gaussian integer constant.
    fn from_int(re: i64, im: i64) -> Self;
    /// Lossless embedding of a finite binary64 complex number (every finite
    /// binary64 value is a dyadic rational).
    fn from_c64(z: FloatScalar) -> Self;
    /// Projection to binary64; lossy on the exact backend and used only for
    /// scale estimates and display, never for exact decisions.
    fn to_c64(&self) -> FloatScalar;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; the divisor must be nonzero (the exact backend has no way
    /// to represent the alternative).
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    /// Exact zero test.  On the float backend this is `== 0.0`; tolerance
    /// decisions belong to the caller.
    fn is_zero(&self) -> bool;

    /// Modulus as binary64 (approximate on the exact backend).
    fn abs(&self) -> f64;

    /// Principal square root: nonnegative real part, and nonnegative
    /// imaginary part when the result is purely imaginary.  The exact
    /// backend returns `None` when no square root exists inside the
    /// Gaussian rationals.
    fn sqrt_principal(&self) -> Option<Self>;

    /// Equality up to `tol` componentwise on the float backend; exact
    /// equality (ignoring `tol`) on the exact backend.
    fn approx_eq(&self, rhs: &Self, tol: f64) -> bool;
}

impl Scalar for FloatScalar {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }

    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn from_int(re: i64, im: i64) -> Self {
        Complex::new(re as f64, im as f64)
    }

    fn from_c64(z: FloatScalar) -> Self {
        z
    }

    fn to_c64(&self) -> FloatScalar {
        *self
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn abs(&self) -> f64 {
        self.norm()
    }

    fn sqrt_principal(&self) -> Option<Self> {
        let mut w = self.sqrt();
        // num's sqrt already lands on the principal branch, but signed zeros
        // can leave a purely imaginary result pointing the wrong way.
        if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
            w = -w;
        }
        if w.re == 0.0 {
            w.re = 0.0; // normalize -0.0
        }
        Some(w)
    }

    fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        (self.re - rhs.re).abs() <= tol && (self.im - rhs.im).abs() <= tol
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }

    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }

    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn from_int(re: i64, im: i64) -> Self {
        Complex::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    fn from_c64(z: FloatScalar) -> Self {
        let part = |x: f64| BigRational::from_float(x).expect("finite float component");
        Complex::new(part(z.re), part(z.im))
    }

    fn to_c64(&self) -> FloatScalar {
        Complex::new(
            self.re.to_f64().unwrap_or(f64::INFINITY),
            self.im.to_f64().unwrap_or(f64::INFINITY),
        )
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    fn sqrt_principal(&self) -> Option<Self> {
        exact_sqrt(self)
    }

    fn approx_eq(&self, rhs: &Self, _tol: f64) -> bool {
        self == rhs
    }
}

/// Square root of a nonnegative rational inside the rationals: both the
/// numerator and denominator of the reduced form must be perfect squares.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    debug_assert!(!r.is_negative());
    let (n, d) = (r.numer(), r.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Principal square root of a Gaussian rational, when it exists in the
/// Gaussian rationals.
///
/// For `z = a + bi` with `b != 0` the root is `w = x + (b / 2x) i` where
/// `x = sqrt((a + |z|) / 2)`, so `w` is rational exactly when both `|z|`
/// and `(a + |z|) / 2` have rational square roots.  Taking `x > 0` lands on
/// the principal branch.
fn exact_sqrt(z: &ExactScalar) -> Option<ExactScalar> {
    let zero = BigRational::zero();
    if z.im.is_zero() {
        return if z.re >= zero {
            rational_sqrt(&z.re).map(|r| Complex::new(r, zero))
        } else {
            // Purely imaginary result; principal branch takes +i sqrt(-a).
            rational_sqrt(&(-&z.re)).map(|r| Complex::new(zero, r))
        };
    }
    let norm = rational_sqrt(&(&z.re * &z.re + &z.im * &z.im))?;
    let x = rational_sqrt(&((&z.re + &norm) / BigRational::from_integer(BigInt::from(2))))?;
    debug_assert!(!x.is_zero());
    let y = &z.im / (&x * BigRational::from_integer(BigInt::from(2)));
    Some(Complex::new(x, y))
}
