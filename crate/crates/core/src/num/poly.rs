//! Dense univariate polynomials in a local coordinate.
//!
//! Weight profiles are piecewise polynomials; each piece stores its
//! coefficients relative to the left breakpoint of the piece, which keeps
//! evaluation well conditioned for breakpoints far from the origin.

/// Polynomial Σ cᵢ·tⁱ.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![0.0] }
    }

    pub fn constant(v: f64) -> Self {
        Poly { c: vec![v] }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &ci in self.c.iter().rev() {
            acc = acc * t + ci;
        }
        acc
    }

    /// Evaluate the `order`-th derivative at `t`.
    pub fn eval_deriv(&self, t: f64, order: u32) -> f64 {
        if order as usize >= self.c.len() {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in (order as usize..self.c.len()).rev() {
            // falling factorial i·(i-1)···(i-order+1)
            let mut fac = 1.0;
            for k in 0..order as usize {
                fac *= (i - k) as f64;
            }
            acc = acc * t + self.c[i] * fac;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &ci)| ci * i as f64)
            .collect();
        Poly { c }
    }

    /// Antiderivative with value `at_zero` at t = 0.
    pub fn antiderivative(&self, at_zero: f64) -> Poly {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(at_zero);
        for (i, &ci) in self.c.iter().enumerate() {
            c.push(ci / (i as f64 + 1.0));
        }
        Poly { c }
    }

    /// p(t) ↦ p(s·t): coefficients cᵢ·sⁱ.
    pub fn scale_arg(&self, s: f64) -> Poly {
        let mut c = self.c.clone();
        let mut pw = 1.0;
        for ci in c.iter_mut() {
            *ci *= pw;
            pw *= s;
        }
        Poly { c }
    }

    pub fn scaled(&self, k: f64) -> Poly {
        Poly {
            c: self.c.iter().map(|ci| ci * k).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0.0; n];
        for (i, ci) in c.iter_mut().enumerate() {
            if i < self.c.len() {
                *ci += self.c[i];
            }
            if i < other.c.len() {
                *ci += other.c[i];
            }
        }
        Poly { c }
    }
}

/// Cubic smoothstep 3t² − 2t³ on [0, 1]: value 0→1 with zero end slopes.
pub fn smoothstep3() -> Poly {
    Poly::new(vec![0.0, 0.0, 3.0, -2.0])
}

/// Quintic smoothstep 10t³ − 15t⁴ + 6t⁵: zero slope and curvature at both ends.
pub fn smoothstep5() -> Poly {
    Poly::new(vec![0.0, 0.0, 0.0, 10.0, -15.0, 6.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_and_antiderivatives() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 3.0]); // 1 - 2t + t²/2 + 3t³
        assert!((p.eval(2.0) - (1.0 - 4.0 + 2.0 + 24.0)).abs() < 1e-14);
        assert!((p.eval_deriv(2.0, 1) - (-2.0 + 2.0 + 36.0)).abs() < 1e-14);
        assert!((p.eval_deriv(2.0, 2) - (1.0 + 36.0)).abs() < 1e-14);
        assert!((p.eval_deriv(2.0, 3) - 18.0).abs() < 1e-14);
        let q = p.derivative().antiderivative(p.eval(0.0));
        for t in [0.0, 0.3, 1.7] {
            assert!((q.eval(t) - p.eval(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn argument_scaling() {
        let p = Poly::new(vec![0.0, 1.0, 2.0]);
        let q = p.scale_arg(0.5); // p(t/2) when s = 1/2
        assert!((q.eval(2.0) - p.eval(1.0)).abs() < 1e-14);
    }

    #[test]
    fn smoothstep_ends() {
        let s3 = smoothstep3();
        let s5 = smoothstep5();
        assert_eq!(s3.eval(0.0), 0.0);
        assert_eq!(s3.eval(1.0), 1.0);
        assert_eq!(s3.eval_deriv(0.0, 1), 0.0);
        assert_eq!(s3.eval_deriv(1.0, 1), 0.0);
        assert_eq!(s5.eval_deriv(1.0, 1), 0.0);
        assert_eq!(s5.eval_deriv(0.0, 2), 0.0);
        assert_eq!(s5.eval_deriv(1.0, 2), 0.0);
    }
}
