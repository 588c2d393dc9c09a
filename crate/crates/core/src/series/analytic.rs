//! Transcendental functions of float series (Taylor-mode recurrences).

use super::TruncatedSeries;
use crate::error::{Error, Result};

impl TruncatedSeries<f64> {
    fn lift(&self, coeffs: Vec<f64>) -> Self {
        TruncatedSeries {
            base: self.base,
            coeffs,
            valid_order: self.effective_valid().min(self.order()),
            polynomial: false,
            approximate: self.approximate,
        }
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let k = self.order();
        let mut b = vec![a[0].exp()];
        for n in 1..=k {
            let s: f64 = (1..=n).map(|j| j as f64 * a[j] * b[n - j]).sum();
            b.push(s / n as f64);
        }
        self.lift(b)
    }

    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            return Err(Error::DomainError("log of a series with nonpositive constant term".into()));
        }
        let k = self.order();
        let mut c = vec![a[0].ln()];
        for n in 1..=k {
            let s: f64 = (1..n).map(|j| j as f64 * c[j] * a[n - j]).sum();
            c.push((a[n] - s / n as f64) / a[0]);
        }
        Ok(self.lift(c))
    }

    /// `self^beta` for real `beta`; the constant term must be positive.
    pub fn powf(&self, beta: f64) -> Result<Self> {
        let a = &self.coeffs;
        if a[0] <= 0.0 {
            return Err(Error::DomainError("real power of a series with nonpositive constant term".into()));
        }
        let k = self.order();
        let mut b = vec![a[0].powf(beta)];
        for n in 1..=k {
            let s: f64 = (1..=n)
                .map(|j| (beta * j as f64 - (n - j) as f64) * a[j] * b[n - j])
                .sum();
            b.push(s / (n as f64 * a[0]));
        }
        Ok(self.lift(b))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(0.5)
    }
}
