use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primitive, separable integer polynomial of degree at least two, assumed
/// irreducible over Q.
///
/// Coefficients are stored in ascending order. The discriminant and η are
/// computed once at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
    discriminant: BigInt,
    eta: BigUint,
}

impl IntPolynomial {
    /// Validates and builds a polynomial with η = |leading coefficient|.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::invalid(format!(
                "polynomial must have degree >= 2, got degree {}",
                coeffs.len() as isize - 1
            )));
        }
        let content = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_one() {
            return Err(Error::invalid(format!(
                "polynomial is not primitive: content {content}"
            )));
        }
        let discriminant = discriminant(&coeffs);
        if discriminant.is_zero() {
            return Err(Error::invalid("polynomial has a repeated factor (discriminant 0)"));
        }
        if let Some(r) = rational_root(&coeffs) {
            return Err(Error::invalid(format!("polynomial is reducible: rational root {r}")));
        }
        if coeffs.len() > 4 {
            log::warn!("degree {} >= 4: irreducibility over Q is assumed, not proven", coeffs.len() - 1);
        }
        let eta = coeffs.last().unwrap().magnitude().clone();
        Ok(IntPolynomial { coeffs, discriminant, eta })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Replaces η. Every prime of the default η = |c_d| must divide the override,
    /// otherwise η·α is not integral.
    pub fn with_eta(mut self, eta: BigUint) -> Result<Self> {
        if eta.is_zero() {
            return Err(Error::invalid("eta must be positive"));
        }
        let needed = &self.eta;
        // c_d | eta^k for some k  <=>  every prime of c_d divides eta
        let mut rest = needed.clone();
        loop {
            let g = rest.gcd(&eta);
            if g.is_one() {
                break;
            }
            rest /= g;
        }
        if !rest.is_one() {
            return Err(Error::invalid(format!(
                "eta = {eta} does not clear the leading coefficient {}",
                self.leading()
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn eta(&self) -> &BigUint {
        &self.eta
    }

    /// η·|D_f|, the integer every admissible modulus must be coprime to.
    pub fn bad_product(&self) -> BigUint {
        &self.eta * self.discriminant.magnitude()
    }

    /// Whether `p` divides η·D_f.
    pub fn is_bad_prime(&self, p: u64) -> bool {
        let p = BigUint::from(p);
        (&self.eta % &p).is_zero() || (self.discriminant.magnitude() % &p).is_zero()
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().unwrap())
            .collect()
    }

    /// Coefficients of f′ reduced into `[0, m)`.
    pub fn derivative_mod(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| (c * BigInt::from(i)).mod_floor(&mb).to_u64().unwrap())
            .collect()
    }

    /// f(v) mod m with every intermediate reduced (Horner).
    pub fn eval_mod(&self, v: u64, m: u64) -> u64 {
        eval_reduced(&self.reduce_mod(m), v, m)
    }

    /// f(v) mod m for arbitrary-precision v and m ≥ 1.
    pub fn eval_mod_big(&self, v: &BigInt, m: &BigInt) -> BigInt {
        let v = v.mod_floor(m);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * &v + c).mod_floor(m);
        }
        acc
    }

    /// Exact value f(v).
    pub fn eval(&self, v: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * v + c)
    }

    /// Exact value f′(v).
    pub fn eval_derivative(&self, v: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigInt::zero(), |acc, (i, c)| acc * v + c * BigInt::from(i))
    }
}

/// Horner evaluation of already-reduced coefficients.
#[inline]
pub fn eval_reduced(coeffs: &[u64], v: u64, m: u64) -> u64 {
    let v = v % m;
    let mut acc = 0u64;
    for &c in coeffs.iter().rev() {
        acc = ((acc as u128 * v as u128 + c as u128) % m as u128) as u64;
    }
    acc
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Comma-separated ascending coefficients, e.g. `"1,0,1"` for x²+1.
    /// Accepts ASCII `-` or U+2212 as the minus sign.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = parse_coefficients(s)?;
        IntPolynomial::new(coeffs)
    }
}

pub fn parse_coefficients(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|tok| {
            let tok: String = tok
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| if c == '\u{2212}' { '-' } else { c })
                .collect();
            if tok.is_empty() {
                return Err(Error::invalid(format!("empty coefficient in {s:?}")));
            }
            BigInt::from_str(&tok)
                .map_err(|_| Error::invalid(format!("bad coefficient {tok:?} in {s:?}")))
        })
        .collect()
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// D_f = (−1)^{d(d−1)/2} · Res(f, f′) / c_d, over the integers.
pub fn discriminant(coeffs: &[BigInt]) -> BigInt {
    let d = coeffs.len() - 1;
    let deriv: Vec<BigInt> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let res = resultant(coeffs, &deriv);
    let (q, r) = res.div_rem(coeffs.last().unwrap());
    debug_assert!(r.is_zero());
    if (d * (d - 1) / 2) % 2 == 1 {
        -q
    } else {
        q
    }
}

/// Resultant as the determinant of the Sylvester matrix, by Bareiss
/// fraction-free elimination.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // rows hold descending coefficients, shifted
    for row in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// A rational root p/q of the polynomial, if one exists with |c_0|, |c_d|
/// small enough to enumerate divisors.
fn rational_root(coeffs: &[BigInt]) -> Option<String> {
    const DIVISOR_CAP: u64 = 1_000_000_000_000;
    if coeffs[0].is_zero() {
        return Some("0".into());
    }
    let c0 = coeffs[0].magnitude().to_u64().filter(|&c| c <= DIVISOR_CAP)?;
    let cd = coeffs.last().unwrap().magnitude().to_u64().filter(|&c| c <= DIVISOR_CAP)?;
    let nums = divisors(c0);
    let dens = divisors(cd);
    for &q in &dens {
        for &p in &nums {
            if p.gcd(&q) != 1 {
                continue;
            }
            for sign in [Sign::Plus, Sign::Minus] {
                // q^d f(p/q) = Σ c_i p^i q^{d-i}
                let d = coeffs.len() - 1;
                let pp = BigInt::from_biguint(sign, BigUint::from(p));
                let qq = BigInt::from(q);
                let mut val = BigInt::zero();
                for (i, c) in coeffs.iter().enumerate() {
                    val += c * pp.pow(i as u32) * qq.pow((d - i) as u32);
                }
                if val.is_zero() {
                    let s = if sign == Sign::Minus { "-" } else { "" };
                    return Some(if q == 1 { format!("{s}{p}") } else { format!("{s}{p}/{q}") });
                }
            }
        }
    }
    None
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(*poly(&[1, 0, 1]).discriminant(), BigInt::from(-4));
        assert_eq!(*poly(&[-2, 0, 0, 1]).discriminant(), BigInt::from(-108));
        assert_eq!(*poly(&[1, 1, 1]).discriminant(), BigInt::from(-3));
        assert_eq!(*poly(&[-1, -1, 1]).discriminant(), BigInt::from(5));
        assert_eq!(*poly(&[-2, 0, 1]).discriminant(), BigInt::from(8));
    }

    #[test]
    fn discriminant_matches_closed_forms() {
        // quadratics: b^2 - 4ac; cubics: b²c² − 4ac³ − 4b³d − 27a²d² + 18abcd
        // (a x³ + b x² + c x + d)
        for a in 1..4i64 {
            for b in -3..4i64 {
                for c in -3..4i64 {
                    let q = [c, b, a];
                    let expect = BigInt::from(b * b - 4 * a * c);
                    let coeffs: Vec<BigInt> = q.iter().map(|&x| BigInt::from(x)).collect();
                    assert_eq!(discriminant(&coeffs), expect, "{q:?}");
                    for d in -3..4i64 {
                        let cub = [d, c, b, a];
                        let expect = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d
                            - 27 * a * a * d * d
                            + 18 * a * b * c * d;
                        let coeffs: Vec<BigInt> = cub.iter().map(|&x| BigInt::from(x)).collect();
                        assert_eq!(discriminant(&coeffs), BigInt::from(expect), "{cub:?}");
                    }
                }
            }
        }
    }

    fn has_repeated_root_mod(f: &IntPolynomial, p: u64) -> bool {
        // degree <= 3: a repeated factor over F_p is necessarily linear
        let c = f.reduce_mod(p);
        let dc = f.derivative_mod(p);
        if c.last() == Some(&0) {
            return true;
        }
        (0..p).any(|v| eval_reduced(&c, v, p) == 0 && eval_reduced(&dc, v, p) == 0)
    }

    #[test]
    fn discriminant_vanishes_exactly_at_repeated_factor_primes() {
        let primes: Vec<u64> = (2..100u64).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
        for f in [poly(&[1, 0, 1]), poly(&[-2, 0, 0, 1])] {
            for &p in &primes {
                let divides = (f.discriminant() % BigInt::from(p)).is_zero();
                assert_eq!(divides, has_repeated_root_mod(&f, p), "f = {f}, p = {p}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly(&[1, 0, 1]).eval_mod(2, 5), 0);
        assert_eq!(poly(&[1, 0, 1]).eval_mod(7, 25), 0);
        assert_eq!(poly(&[-2, 0, 0, 1]).eval_mod(3, 25), 0);
        assert_eq!(poly(&[-2, 0, 0, 1]).eval_mod(1, 7), 6);
    }

    #[test]
    fn validation() {
        assert!(IntPolynomial::from_i64(&[1, 1]).is_err());
        assert!(IntPolynomial::from_i64(&[2, 0, 2]).is_err());
        assert!(IntPolynomial::from_i64(&[-1, 0, 1]).is_err());
        assert!(IntPolynomial::from_i64(&[0, 1, 1]).is_err());
        assert!(IntPolynomial::from_i64(&[1, 2, 1]).is_err());
        assert!(IntPolynomial::from_i64(&[-1, 0, 4]).is_err()); // root 1/2
        assert!(IntPolynomial::from_i64(&[1, 0, 0, 2]).is_ok());
        assert_eq!(poly(&[1, 0, 0, 2]).eta(), &BigUint::from(2u32));
    }

    #[test]
    fn parsing() {
        let f: IntPolynomial = " 1 , 0 ,1 ".parse().unwrap();
        assert_eq!(f, poly(&[1, 0, 1]));
        let g: IntPolynomial = "\u{2212}1,\u{2212}1,1".parse().unwrap();
        assert_eq!(g, poly(&[-1, -1, 1]));
        let big: IntPolynomial = "123456789012345678901234567890,0,1".parse().unwrap();
        assert_eq!(big.degree(), 2);
        assert!("1,,1".parse::<IntPolynomial>().is_err());
        assert!("1,x,1".parse::<IntPolynomial>().is_err());
        assert_eq!(f.to_string(), "1,0,1");
    }

    #[test]
    fn eta_override() {
        let f = poly(&[1, 0, 0, 2]);
        assert!(f.clone().with_eta(BigUint::from(4u32)).is_ok());
        assert!(f.clone().with_eta(BigUint::from(3u32)).is_err());
        let g = f.with_eta(BigUint::from(6u32)).unwrap();
        assert!(g.is_bad_prime(3));
    }
}
