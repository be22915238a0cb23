//! Truncated second-order forward-mode differentiation.
//!
//! A [`Jet2`] carries a value, the flat gradient, and the full flat Hessian
//! through arithmetic in one pass. Seeding the coordinates of an evaluation
//! point and running a closed-form expression yields exact (to roundoff)
//! first and second partial derivatives; no nesting of dual numbers and no
//! third-order terms are kept.

use crate::scalar::Real;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, gradient, and symmetric Hessian of a scalar expression at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<R> {
    pub v: R,
    /// Flat first partials, length d.
    pub g: Vec<R>,
    /// Flat second partials, row-major d*d, kept symmetric.
    pub h: Vec<R>,
}

impl<R: Real> Jet2<R> {
    pub fn constant(dim: usize, v: R) -> Self {
        Jet2 {
            v,
            g: vec![R::zero(); dim],
            h: vec![R::zero(); dim * dim],
        }
    }

    /// Coordinate jet for x_i at the point p.
    pub fn var(p: &[R], i: usize) -> Self {
        let mut j = Self::constant(p.len(), p[i]);
        j.g[i] = R::one();
        j
    }

    /// All coordinate jets at p.
    pub fn coords(p: &[R]) -> Vec<Self> {
        (0..p.len()).map(|i| Self::var(p, i)).collect()
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> R {
        self.h[i * self.dim() + j]
    }

    /// Chain rule for a scalar function with derivatives d1, d2 at self.v.
    fn compose(&self, v: R, d1: R, d2: R) -> Self {
        let d = self.dim();
        let mut out = Jet2 {
            v,
            g: self.g.iter().map(|&gi| d1 * gi).collect(),
            h: vec![R::zero(); d * d],
        };
        for i in 0..d {
            for j in 0..d {
                out.h[i * d + j] = d2 * self.g[i] * self.g[j] + d1 * self.h[i * d + j];
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.v.recip();
        self.compose(v, -v * v, R::two() * v * v * v)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let d1 = R::half() / s;
        self.compose(s, d1, -d1 / (R::two() * self.v))
    }

    pub fn sq(&self) -> Self {
        self * self
    }

    pub fn scale(&self, c: R) -> Self {
        Jet2 {
            v: self.v * c,
            g: self.g.iter().map(|&x| x * c).collect(),
            h: self.h.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add_scalar(&self, c: R) -> Self {
        let mut out = self.clone();
        out.v = out.v + c;
        out
    }

    /// Sum of squares of a slice of jets (all of the same dimension).
    pub fn norm_sq(jets: &[Self]) -> Self {
        let d = jets[0].dim();
        let mut acc = Self::constant(d, R::zero());
        for j in jets {
            acc = &acc + &j.sq();
        }
        acc
    }
}

impl<R: Real> Add for &Jet2<R> {
    type Output = Jet2<R>;
    fn add(self, rhs: Self) -> Jet2<R> {
        debug_assert_eq!(self.dim(), rhs.dim());
        Jet2 {
            v: self.v + rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(&a, &b)| a + b).collect(),
            h: self.h.iter().zip(&rhs.h).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<R: Real> Sub for &Jet2<R> {
    type Output = Jet2<R>;
    fn sub(self, rhs: Self) -> Jet2<R> {
        debug_assert_eq!(self.dim(), rhs.dim());
        Jet2 {
            v: self.v - rhs.v,
            g: self.g.iter().zip(&rhs.g).map(|(&a, &b)| a - b).collect(),
            h: self.h.iter().zip(&rhs.h).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<R: Real> Mul for &Jet2<R> {
    type Output = Jet2<R>;
    fn mul(self, rhs: Self) -> Jet2<R> {
        let d = self.dim();
        debug_assert_eq!(d, rhs.dim());
        let mut h = vec![R::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                h[i * d + j] = self.h[i * d + j] * rhs.v
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i]
                    + self.v * rhs.h[i * d + j];
            }
        }
        Jet2 {
            v: self.v * rhs.v,
            g: self
                .g
                .iter()
                .zip(&rhs.g)
                .map(|(&a, &b)| a * rhs.v + self.v * b)
                .collect(),
            h,
        }
    }
}

impl<R: Real> Div for &Jet2<R> {
    type Output = Jet2<R>;
    // Division propagates through the reciprocal's chain rule.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Jet2<R> {
        self * &rhs.recip()
    }
}

impl<R: Real> Neg for &Jet2<R> {
    type Output = Jet2<R>;
    fn neg(self) -> Jet2<R> {
        self.scale(-R::one())
    }
}

/// Value and Jacobian of a vector expression: comp[i] with jac[i*d+j] = d_j Z^i.
#[derive(Debug, Clone)]
pub struct VecJet<R> {
    pub comp: Vec<R>,
    pub jac: Vec<R>,
}

impl<R: Real> VecJet<R> {
    /// Assembles a vector jet from per-component scalar jets (Hessians dropped).
    pub fn from_components(parts: &[Jet2<R>]) -> Self {
        let d = parts[0].dim();
        let mut jac = vec![R::zero(); parts.len() * d];
        for (i, p) in parts.iter().enumerate() {
            jac[i * d..(i + 1) * d].copy_from_slice(&p.g);
        }
        VecJet {
            comp: parts.iter().map(|p| p.v).collect(),
            jac,
        }
    }

    pub fn dim(&self) -> usize {
        self.comp.len()
    }

    /// d_j of component i.
    pub fn jac(&self, i: usize, j: usize) -> R {
        self.jac[i * self.dim() + j]
    }
}
