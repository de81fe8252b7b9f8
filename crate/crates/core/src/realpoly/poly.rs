use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactlin::Rat;

/// Dense univariate polynomial over `Q`, coefficients in ascending degree.
///
/// Trailing zeros are never stored, so the zero polynomial has no
/// coefficients and equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

pub(crate) fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading_coeff(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(Rat::one() / self.leading_coeff()))
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rat::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / rat(k as i64 + 1)),
        );
        Poly::from_coeffs(coeffs)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Rat]) -> Poly {
        roots.iter().fold(Poly::one(), |acc, r| {
            &acc * &Poly::from_coeffs(vec![-r.clone(), Rat::one()])
        })
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rat) -> i32 {
        sign_of_ints(&self.primitive_ints(), x)
    }

    /// Positive multiple of `self` with coprime integer coefficients.
    pub(crate) fn primitive_ints(&self) -> Vec<BigInt> {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.into_iter().map(|c| c / &g).collect()
        }
    }

    /// Enclosure of `{p(x) : lo ≤ x ≤ hi}` by interval Horner evaluation.
    pub fn eval_interval(&self, lo: &Rat, hi: &Rat) -> (Rat, Rat) {
        if lo == hi {
            let v = self.eval(lo);
            return (v.clone(), v);
        }
        let mut acc_lo = Rat::zero();
        let mut acc_hi = Rat::zero();
        for c in self.coeffs.iter().rev() {
            let products = [&acc_lo * lo, &acc_lo * hi, &acc_hi * lo, &acc_hi * hi];
            let mut min = products[0].clone();
            let mut max = products[0].clone();
            for p in &products[1..] {
                if *p < min {
                    min = p.clone();
                }
                if *p > max {
                    max = p.clone();
                }
            }
            acc_lo = min + c;
            acc_hi = max + c;
        }
        (acc_lo, acc_hi)
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let dd = divisor.degree();
        let lead_inv = Rat::one() / divisor.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let r = x.rem(&y).monic();
            x = y;
            y = r;
        }
        x
    }

    pub fn is_squarefree(&self) -> bool {
        Poly::gcd(self, &self.derivative()).is_constant()
    }

    /// Monic squarefree part.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return self.monic();
        }
        let g = Poly::gcd(self, &self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Yun's squarefree factorization: monic, pairwise coprime `F_1, F_2, …`
    /// with `p = lc(p) · ∏ F_i^i`. Entry `i - 1` holds `F_i`.
    pub fn squarefree_factors(&self) -> Vec<Poly> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let dp = self.derivative();
        let a0 = Poly::gcd(self, &dp);
        let mut b = self.div_rem(&a0).0;
        let mut c = dp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        loop {
            let a = Poly::gcd(&b, &d);
            out.push(a.monic());
            b = b.div_rem(&a).0;
            if b.is_constant() {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
        }
        while out.last().is_some_and(Poly::is_constant) {
            out.pop();
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &Rat) -> Poly {
        self.compose(&Poly::from_coeffs(vec![c.clone(), Rat::one()]))
    }

    /// Human-readable form in the variable `var`, highest degree first.
    pub fn display_with(&self, var: char) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let unit = mag.is_one();
            if !unit || k == 0 {
                if mag.is_integer() || k == 0 {
                    out.push_str(&mag.to_string());
                } else {
                    out.push_str(&format!("({mag})"));
                }
                if k > 0 {
                    out.push('*');
                }
            }
            match k {
                0 => {}
                1 => out.push(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }

    /// `coeffs: c0,c1,…` in ascending degree.
    pub fn to_coeff_list(&self) -> String {
        let items: Vec<String> = if self.is_zero() {
            vec!["0".into()]
        } else {
            self.coeffs.iter().map(|c| c.to_string()).collect()
        };
        format!("coeffs: {}", items.join(","))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with('x'))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Sign of the integer polynomial `coeffs` at `x`, evaluated as
/// `den^n · p(num/den)` so that no intermediate gcd is taken.
pub(crate) fn sign_of_ints(coeffs: &[BigInt], x: &Rat) -> i32 {
    let (num, den) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut den_pow = BigInt::one();
    for c in coeffs.iter().rev() {
        acc = acc * num + c * &den_pow;
        den_pow *= den;
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}
