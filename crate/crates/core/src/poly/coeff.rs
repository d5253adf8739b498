//! Coefficient rings: double-precision complex and exact Gaussian rationals.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex numbers with exact rational parts.
pub type GaussianRational = Complex<BigRational>;

pub trait Coeff:
    Clone + Debug + PartialEq + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiply by the imaginary unit.
    fn times_i(&self) -> Self;
    fn conj(&self) -> Self;
    /// |c| as a float, used for norms and drop ledgers.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Whether a freshly accumulated coefficient should be pruned, given the
    /// magnitude of the largest contribution that went into it.
    fn negligible(&self, scale: f64) -> bool;
}

/// Relative threshold below which cancelled float coefficients are removed.
pub const PRUNE_REL: f64 = 1e-15;

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn times_i(&self) -> Self {
        Complex64::new(-self.im, self.re)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= PRUNE_REL * scale
    }
}

impl Coeff for GaussianRational {
    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn from_int(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn times_i(&self) -> Self {
        Complex::new(-self.im.clone(), self.re.clone())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
    fn negligible(&self, _scale: f64) -> bool {
        Coeff::is_zero(self)
    }
}

/// Exact Gaussian rational p/q + i r/q.
pub fn gaussian(re_num: i64, im_num: i64, den: i64) -> GaussianRational {
    let d = BigInt::from(den);
    Complex::new(
        BigRational::new(BigInt::from(re_num), d.clone()),
        BigRational::new(BigInt::from(im_num), d),
    )
}

/// Whether an exact coefficient is real.
pub fn is_exactly_real(c: &GaussianRational) -> bool {
    c.im.is_zero()
}

/// |re| + |im| for exact coefficients, kept exact.
pub fn exact_l1(c: &GaussianRational) -> BigRational {
    c.re.abs() + c.im.abs()
}
