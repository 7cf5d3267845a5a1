//! Composition algebras built by Cayley–Dickson doubling.
//!
//! Product on pairs: `(a,b)(c,e) = (ac + γ ē b, e a + b c̄)`, conjugation
//! `(a,b)̄ = (ā, −b)`. With this rule the norm form of a doubled algebra is
//! `N((a,b)) = N(a) − γ N(b)`.

use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Ring, Sign};

pub const PRODUCT_RULE: &str = "(a,b)(c,e) = (ac + g*conj(e)*b, e*a + b*conj(c))";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraTag {
    R,
    C,
    A,
    H,
    B,
    O,
    Oprime,
}

impl AlgebraTag {
    pub const COMPOSITION: [AlgebraTag; 6] = [
        AlgebraTag::C,
        AlgebraTag::A,
        AlgebraTag::H,
        AlgebraTag::B,
        AlgebraTag::O,
        AlgebraTag::Oprime,
    ];

    pub fn doubling_signs(self) -> &'static [Sign] {
        use Sign::*;
        match self {
            AlgebraTag::R => &[],
            AlgebraTag::C => &[Minus],
            AlgebraTag::A => &[Plus],
            AlgebraTag::H => &[Minus, Minus],
            AlgebraTag::B => &[Minus, Plus],
            AlgebraTag::O => &[Minus, Minus, Minus],
            AlgebraTag::Oprime => &[Minus, Minus, Plus],
        }
    }

    pub fn dim(self) -> usize {
        1 << self.doubling_signs().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgebraTag::R => "R",
            AlgebraTag::C => "C",
            AlgebraTag::A => "A",
            AlgebraTag::H => "H",
            AlgebraTag::B => "B",
            AlgebraTag::O => "O",
            AlgebraTag::Oprime => "Oprime",
        }
    }

    pub fn from_name(s: &str) -> Option<AlgebraTag> {
        Some(match s {
            "R" => AlgebraTag::R,
            "C" => AlgebraTag::C,
            "A" => AlgebraTag::A,
            "H" => AlgebraTag::H,
            "B" => AlgebraTag::B,
            "O" => AlgebraTag::O,
            "Oprime" | "O'" => AlgebraTag::Oprime,
            _ => return None,
        })
    }

    /// Division algebras have a positive definite norm form.
    pub fn is_division(self) -> bool {
        self.doubling_signs().iter().all(|s| s.is_negative())
    }

    /// Diagonal of the norm form in the doubled basis: `N(e_i)`.
    pub fn norm_diagonal(self) -> Vec<Sign> {
        let mut diag = vec![Sign::Plus];
        for &g in self.doubling_signs() {
            let tail: Vec<Sign> = diag.iter().map(|&s| -(g * s)).collect();
            diag.extend(tail);
        }
        diag
    }

    /// `(positive, negative)` counts of the norm form.
    pub fn norm_signature(self) -> (usize, usize) {
        let neg = self.norm_diagonal().iter().filter(|s| s.is_negative()).count();
        (self.dim() - neg, neg)
    }

    pub fn table(self) -> &'static MultiplicationTable {
        static TABLES: [OnceLock<MultiplicationTable>; 7] = [
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
        ];
        let slot = match self {
            AlgebraTag::R => 0,
            AlgebraTag::C => 1,
            AlgebraTag::A => 2,
            AlgebraTag::H => 3,
            AlgebraTag::B => 4,
            AlgebraTag::O => 5,
            AlgebraTag::Oprime => 6,
        };
        TABLES[slot].get_or_init(|| MultiplicationTable::build(self))
    }
}

/// One Cayley–Dickson step.
pub fn cayley_dickson_double(base: AlgebraTag, gamma: Sign) -> Result<AlgebraTag> {
    use AlgebraTag::*;
    match (base, gamma) {
        (R, Sign::Minus) => Ok(C),
        (R, Sign::Plus) => Ok(A),
        (C, Sign::Minus) => Ok(H),
        (C, Sign::Plus) => Ok(B),
        (H, Sign::Minus) => Ok(O),
        (H, Sign::Plus) => Ok(Oprime),
        (A, _) => Err(Error::UnsupportedDoubling { base, hint: C }),
        (B, _) => Err(Error::UnsupportedDoubling { base, hint: H }),
        (O, _) | (Oprime, _) => Err(Error::DoublingLimit { base }),
    }
}

/// Recursive Cayley–Dickson product on raw coefficient slices.
pub fn cd_mul<T: Ring>(signs: &[Sign], x: &[T], y: &[T]) -> Vec<T> {
    if signs.is_empty() {
        return vec![x[0] * y[0]];
    }
    let (inner, g) = (&signs[..signs.len() - 1], signs[signs.len() - 1]);
    let h = x.len() / 2;
    let (a, b) = x.split_at(h);
    let (c, e) = y.split_at(h);
    let ac = cd_mul(inner, a, c);
    let eb = cd_mul(inner, &cd_conj(e), b);
    let ea = cd_mul(inner, e, a);
    let bc = cd_mul(inner, b, &cd_conj(c));
    let mut out = Vec::with_capacity(x.len());
    out.extend(ac.iter().zip(&eb).map(|(&p, &q)| p + g.apply(q)));
    out.extend(ea.iter().zip(&bc).map(|(&p, &q)| p + q));
    out
}

/// Conjugation on raw coefficients: negate every non-unit component.
pub fn cd_conj<T: Ring>(x: &[T]) -> Vec<T> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if i == 0 { v } else { -v })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<T> {
    pub tag: AlgebraTag,
    pub coeffs: Vec<T>,
}

impl<T: Ring> AlgebraElement<T> {
    pub fn new(tag: AlgebraTag, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != tag.dim() {
            return Err(Error::CoefficientCount {
                expected: tag.dim(),
                got: coeffs.len(),
            });
        }
        Ok(AlgebraElement { tag, coeffs })
    }

    pub fn zero(tag: AlgebraTag) -> Self {
        AlgebraElement {
            tag,
            coeffs: vec![T::zero(); tag.dim()],
        }
    }

    pub fn one(tag: AlgebraTag) -> Self {
        Self::basis(tag, 0)
    }

    /// Basis element `e_{i+1}` (index 0 is the unit).
    pub fn basis(tag: AlgebraTag, i: usize) -> Self {
        let mut z = Self::zero(tag);
        z.coeffs[i] = T::one();
        z
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn re(&self) -> T {
        self.coeffs[0]
    }

    pub fn conj(&self) -> Self {
        AlgebraElement {
            tag: self.tag,
            coeffs: cd_conj(&self.coeffs),
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.tag != other.tag {
            return Err(Error::TagMismatch {
                left: self.tag,
                right: other.tag,
            });
        }
        Ok(())
    }

    /// Product through the cached multiplication table.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(AlgebraElement {
            tag: self.tag,
            coeffs: self.tag.table().apply(&self.coeffs, &other.coeffs),
        })
    }

    /// Product by the recursive doubling formula.
    pub fn mul_recursive(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(AlgebraElement {
            tag: self.tag,
            coeffs: cd_mul(self.tag.doubling_signs(), &self.coeffs, &other.coeffs),
        })
    }

    /// `N(z) = Re(z̄ z)`.
    pub fn norm_form(&self) -> T {
        inner_raw(self.tag, &self.coeffs, &self.coeffs)
    }

    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check(other)?;
        Ok(inner_raw(self.tag, &self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, s: T) -> Self {
        AlgebraElement {
            tag: self.tag,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }
}

/// Polar form of the norm on raw coefficients.
pub fn inner_raw<T: Ring>(tag: AlgebraTag, x: &[T], y: &[T]) -> T {
    tag.norm_diagonal()
        .iter()
        .zip(x.iter().zip(y))
        .fold(T::zero(), |acc, (s, (&a, &b))| acc + s.apply(a * b))
}

impl<T: Ring> Add for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn add(self, rhs: Self) -> AlgebraElement<T> {
        assert_eq!(self.tag, rhs.tag, "algebra mismatch in addition");
        AlgebraElement {
            tag: self.tag,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Ring> Sub for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn sub(self, rhs: Self) -> AlgebraElement<T> {
        assert_eq!(self.tag, rhs.tag, "algebra mismatch in subtraction");
        AlgebraElement {
            tag: self.tag,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Ring> Neg for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;

    fn neg(self) -> AlgebraElement<T> {
        AlgebraElement {
            tag: self.tag,
            coeffs: self.coeffs.iter().map(|&a| -a).collect(),
        }
    }
}

/// Entry `(i, j)` holds `(k, σ)` with `e_i e_j = σ e_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicationTable {
    pub tag: AlgebraTag,
    pub doubling_signs: Vec<i8>,
    pub product_rule: String,
    pub entries: Vec<Vec<(usize, i8)>>,
}

impl MultiplicationTable {
    pub fn build(tag: AlgebraTag) -> Self {
        let d = tag.dim();
        let signs = tag.doubling_signs();
        let mut entries = vec![vec![(0usize, 1i8); d]; d];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut x = vec![0i64; d];
                let mut y = vec![0i64; d];
                x[i] = 1;
                y[j] = 1;
                let prod = cd_mul(signs, &x, &y);
                let (k, v) = prod
                    .iter()
                    .enumerate()
                    .find(|(_, &v)| v != 0)
                    .expect("product of basis elements is a signed basis element");
                *slot = (k, *v as i8);
            }
        }
        MultiplicationTable {
            tag,
            doubling_signs: signs.iter().map(|s| s.as_i8()).collect(),
            product_rule: PRODUCT_RULE.to_string(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn basis_product(&self, i: usize, j: usize) -> (usize, Sign) {
        let (k, s) = self.entries[i][j];
        (k, if s < 0 { Sign::Minus } else { Sign::Plus })
    }

    /// Bilinear extension of the table to coefficient vectors.
    pub fn apply<T: Ring>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let d = self.dim();
        let mut out = vec![T::zero(); d];
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let (k, s) = self.entries[i][j];
                let p = xi * yj;
                out[k] = if s < 0 { out[k] - p } else { out[k] + p };
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}
