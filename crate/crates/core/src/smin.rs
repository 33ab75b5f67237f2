//! Smooth minimum `smin(x) = -ln(sum_i exp(-x_i))` and its scaled variant
//! `smin_c(x) = c * smin(x / c)`.
//!
//! Both are evaluated with the minimum factored out so that large request
//! counts never underflow the exponentials. The gradient of `smin_c` is a
//! probability vector (a softmin with temperature `c`); the hitting game and
//! the randomized MTS solver place their position according to it.

use alloc::vec::Vec;

use crate::error::Error;

/// A probability vector: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Point mass on entry `at`.
    pub fn point(len: usize, at: usize) -> Self {
        let mut p = alloc::vec![0.0; len];
        p[at] = 1.0;
        ProbVector(p)
    }

    pub fn uniform(len: usize) -> Self {
        ProbVector(alloc::vec![1.0 / len as f64; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Copy of `self` placed at `offset` inside a vector of length `len`.
    pub fn embed(&self, offset: usize, len: usize) -> ProbVector {
        let mut p = alloc::vec![0.0; len];
        p[offset..offset + self.0.len()].copy_from_slice(&self.0);
        ProbVector(p)
    }

    /// Entries non-negative and summing to one within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let sum: f64 = self.0.iter().sum();
        self.0.iter().all(|&p| p >= 0.0 && p.is_finite()) && (sum - 1.0).abs() <= tol
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(p, x)| p * x).sum()
    }

    pub fn l1_distance(&self, other: &ProbVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| libm::fabs(a - b)).sum()
    }
}

fn minimum(x: &[f64]) -> Result<f64, Error> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(x.iter().copied().fold(f64::INFINITY, f64::min))
}

fn check_scale(c: f64) -> Result<(), Error> {
    if c >= 1.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name: "c", value: c })
    }
}

/// `-ln(sum_i exp(-x_i / c))` times `c`, shifted by the minimum.
fn scaled(x: &[f64], c: f64) -> Result<f64, Error> {
    let m = minimum(x)?;
    let s: f64 = x.iter().map(|&v| libm::exp(-(v - m) / c)).sum();
    Ok(m - c * libm::log(s))
}

fn scaled_grad(x: &[f64], c: f64) -> Result<ProbVector, Error> {
    let m = minimum(x)?;
    let mut w: Vec<f64> = x.iter().map(|&v| libm::exp(-(v - m) / c)).collect();
    let s: f64 = w.iter().sum();
    for v in &mut w {
        *v /= s;
    }
    Ok(ProbVector(w))
}

pub fn smin(x: &[f64]) -> Result<f64, Error> {
    scaled(x, 1.0)
}

pub fn grad_smin(x: &[f64]) -> Result<ProbVector, Error> {
    scaled_grad(x, 1.0)
}

/// `c * smin(x / c)` for a real `c >= 1`.
pub fn smin_c(x: &[f64], c: f64) -> Result<f64, Error> {
    check_scale(c)?;
    scaled(x, c)
}

/// Gradient of [`smin_c`], equal to `grad_smin(x / c)`.
pub fn grad_smin_c(x: &[f64], c: f64) -> Result<ProbVector, Error> {
    check_scale(c)?;
    scaled_grad(x, c)
}
