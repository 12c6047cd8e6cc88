//! The pair of quadrics cut out by a descent pair `(b1, b2)`:
//!
//! ```text
//! Q1 = b1 x1^2 - b2 x2^2      - 2^m n^2   x0^2
//! Q2 = b1 x1^2 - b1 b2 x3^2   + 2^m       x0^2
//! Q3 = b1 b2 x3^2 - b2 x2^2   - 2^(m+1) q x0^2   (= Q1 - Q2)
//! ```
//!
//! Setting `x0 = 1` recovers the affine torsor equations in `(z1, z2, z3)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::curve::HeronCurve;
use crate::padic::val;
use crate::squareclass::DescentPair;

/// A diagonal quadratic form `sum c_i x_i^2` in `(x0, x1, x2, x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadForm {
    pub coeffs: [i128; 4],
}

impl QuadForm {
    pub fn eval(&self, x: &[BigInt; 4]) -> BigInt {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(&c, xi)| BigInt::from(c) * xi * xi)
            .sum()
    }

    pub fn eval_i128(&self, x: &[i128; 4]) -> Option<i128> {
        self.coeffs.iter().zip(x).try_fold(0i128, |acc, (&c, &xi)| {
            acc.checked_add(c.checked_mul(xi.checked_mul(xi)?)?)
        })
    }

    /// Gradient coefficients: `dQ/dx_i = 2 c_i x_i`.
    pub fn gradient(&self, x: &[BigInt; 4]) -> [BigInt; 4] {
        std::array::from_fn(|i| BigInt::from(2 * self.coeffs[i]) * &x[i])
    }
}

impl std::ops::Sub for QuadForm {
    type Output = QuadForm;

    fn sub(self, rhs: QuadForm) -> QuadForm {
        QuadForm { coeffs: std::array::from_fn(|i| self.coeffs[i] - rhs.coeffs[i]) }
    }
}

/// Rows are the gradients of `Q1` and `Q2`; entry `(r, j)` is the linear form
/// `entries[r][j] * x_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JacobianMatrix {
    pub entries: [[i128; 4]; 2],
}

impl JacobianMatrix {
    pub fn at(&self, x: &[BigInt; 4]) -> [[BigInt; 4]; 2] {
        std::array::from_fn(|r| std::array::from_fn(|j| BigInt::from(self.entries[r][j]) * &x[j]))
    }

    /// The six 2x2 minors, columns `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.
    pub fn minors(&self, x: &[BigInt; 4]) -> [BigInt; 6] {
        let m = self.at(x);
        let mut out: [BigInt; 6] = Default::default();
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                out[k] = &m[0][i] * &m[1][j] - &m[0][j] * &m[1][i];
                k += 1;
            }
        }
        out
    }

    /// Constant `C_ij` with `minor_ij = C_ij x_i x_j` (the forms are diagonal).
    pub fn minor_constants(&self) -> [[i128; 4]; 4] {
        let e = &self.entries;
        let mut c = [[0i128; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    c[i][j] = e[0][i] * e[1][j] - e[0][j] * e[1][i];
                }
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousSpace {
    pub pair: DescentPair,
    pub b1: i128,
    pub b2: i128,
    /// `2^m n^2`
    pub a: i128,
    /// `2^m`
    pub b: i128,
    pub q1: QuadForm,
    pub q2: QuadForm,
    pub q3: QuadForm,
}

impl HomogeneousSpace {
    pub fn build(curve: &HeronCurve, pair: &DescentPair) -> Self {
        let (b1, b2) = (pair.b1.value(), pair.b2.value());
        let (a, b) = (curve.a(), curve.b());
        let q1 = QuadForm { coeffs: [-a, b1, -b2, 0] };
        let q2 = QuadForm { coeffs: [b, b1, 0, -b1 * b2] };
        let q3 = QuadForm { coeffs: [-(a + b), 0, -b2, b1 * b2] };
        HomogeneousSpace { pair: pair.clone(), b1, b2, a, b, q1, q2, q3 }
    }

    pub fn forms(&self) -> [&QuadForm; 2] {
        [&self.q1, &self.q2]
    }

    /// Exact values of `(Q1, Q2)`.
    pub fn evaluate_exact(&self, x: &[BigInt; 4]) -> [BigInt; 2] {
        [self.q1.eval(x), self.q2.eval(x)]
    }

    /// `(Q1, Q2)` reduced into `[0, modulus)`.
    pub fn evaluate(&self, x: &[BigInt; 4], modulus: &BigInt) -> [BigInt; 2] {
        self.evaluate_exact(x).map(|v| v.mod_floor(modulus))
    }

    pub fn jacobian(&self) -> JacobianMatrix {
        JacobianMatrix {
            entries: [self.q1.coeffs.map(|c| 2 * c), self.q2.coeffs.map(|c| 2 * c)],
        }
    }

    /// Minimal l-adic valuation of the 2x2 minors at `x`; `None` when every
    /// minor vanishes.
    pub fn jacobian_minor_valuation(&self, x: &[BigInt; 4], l: u64) -> Option<u32> {
        self.jacobian()
            .minors(x)
            .iter()
            .filter_map(|m| val(m, l).map(|(v, _)| v))
            .min()
    }

    /// Upper bound on the minor valuation at any primitive `Z_l`-point of the
    /// intersection.
    ///
    /// With `x_i` a unit and `h` the least valuation among the other
    /// coordinates, some equation gives `v(c_i) >= 2h`, and the minor through
    /// that coordinate has valuation at most `v(C_ij) + h`.
    pub fn minor_valuation_bound(&self, l: u64) -> u32 {
        let consts = self.jacobian().minor_constants();
        let v = |x: i128| val(&BigInt::from(x), l).map(|(v, _)| v);
        (0..4)
            .map(|i| {
                let h = self
                    .forms()
                    .iter()
                    .filter_map(|f| v(f.coeffs[i]))
                    .min()
                    .expect("every variable occurs in some form")
                    / 2;
                let cmax = (0..4)
                    .filter(|&j| j != i)
                    .map(|j| v(consts[i][j]).expect("minor constants are nonzero"))
                    .max()
                    .unwrap();
                cmax + h
            })
            .max()
            .unwrap()
    }

    /// A point of the identity torsor: `(0, 1, 1, 1)` lies on the pair
    /// `(1, 1)` for every curve.
    pub fn identity_point() -> [BigInt; 4] {
        [BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::one()]
    }
}
