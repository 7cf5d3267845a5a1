//! Scalar abstractions.
//!
//! The algebra layer only needs ring operations, so it runs over exact types
//! (`i64`, `num_rational::Ratio<i64>`) as well as floats. Everything that
//! takes square roots, solves linear systems or differentiates needs [`Real`].

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::RealField;
use num_traits::Num;

/// Ring-like scalar: enough for Cayley–Dickson products, conjugation and norms.
pub trait Ring: Num + Neg<Output = Self> + Copy + PartialEq + Debug + 'static {}

impl<T> Ring for T where T: Num + Neg<Output = T> + Copy + PartialEq + Debug + 'static {}

/// Real floating point scalar (`f32` or `f64`).
pub trait Real: RealField + Copy {
    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        nalgebra::convert(x)
    }

    fn to_f64(self) -> f64;
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

/// A sign in `{-1, +1}`, used for doubling parameters and metric signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Sign {
    pub fn from_i8(s: i8) -> Option<Sign> {
        match s {
            -1 => Some(Sign::Minus),
            1 => Some(Sign::Plus),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    /// Applies the sign to a ring element.
    pub fn apply<T: Ring>(self, x: T) -> T {
        match self {
            Sign::Minus => -x,
            Sign::Plus => x,
        }
    }

    pub fn value<T: Ring>(self) -> T {
        self.apply(T::one())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}
