//! Exact scalar domains: rationals, complex rationals, and the ordered
//! field ℚ(R) of rational functions ordered at R → +∞.
//!
//! All combinatorial decisions in this crate (feasibility, boundedness,
//! genericity) are made over one of these domains; floating point enters
//! only at integration time.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational scalar. `BigRational` keeps the canonical form
/// (gcd-reduced, positive denominator) by construction.
pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p", "p/q" or a decimal like "-0.25" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|e| format!("bad numerator {p:?}: {e}"))?;
        let den: BigInt = q.trim().parse().map_err(|e| format!("bad denominator {q:?}: {e}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rat::new(num, den))
    } else if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|e| format!("bad number {s:?}: {e}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let signed_frac = if neg { -frac_part } else { frac_part.clone() };
        Ok(Rat::new(int_part * &scale + signed_frac, scale))
    } else {
        let num: BigInt = s.parse().map_err(|e| format!("bad number {s:?}: {e}"))?;
        Ok(Rat::from_integer(num))
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a quotient of leading digits for extreme magnitudes
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of<K: Scalar>(x: &K) -> Sign {
        match x.cmp(&K::zero()) {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    /// +1 / 0 / −1 as an integer factor.
    pub fn factor(self) -> i64 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Neg),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Pos),
            _ => None,
        }
    }
}

/// An exactly ordered field. `Rat` is the base instance; `RatFn` realizes
/// ℚ(R) with the order induced by evaluation at R → +∞.
pub trait Scalar:
    Clone
    + Ord
    + Eq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rat(r: &Rat) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rat(&rat_i(n))
    }

    fn sign(&self) -> Sign {
        Sign::of(self)
    }

    fn abs(&self) -> Self {
        if self.sign() == Sign::Neg {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

// ---------------------------------------------------------------------------
// Complex rationals
// ---------------------------------------------------------------------------

/// Complex number with exact rational real and imaginary parts. Used for
/// twist exponents and residue matrices so integrality is decidable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        CRat { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        CRat::from_rat(rat_i(n))
    }

    pub fn zero() -> Self {
        CRat::from_int(0)
    }

    pub fn one() -> Self {
        CRat::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact integrality test: a complex rational is an integer iff its
    /// imaginary part vanishes and its real part has denominator 1.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.denom().is_one()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rat_to_string(&self.re))
        } else {
            write!(f, "{}{:+}i", rat_to_string(&self.re), self.im)
        }
    }
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, o: CRat) -> CRat {
        CRat::new(self.re + o.re, self.im + o.im)
    }
}

impl<'a> Add<&'a CRat> for CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat::new(self.re + &o.re, self.im + &o.im)
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, o: CRat) -> CRat {
        CRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, o: CRat) -> CRat {
        CRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re, -self.im)
    }
}

// ---------------------------------------------------------------------------
// Polynomials over ℚ and the ordered field ℚ(R)
// ---------------------------------------------------------------------------

/// Dense polynomial over ℚ, little-endian coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<Rat>);

impl Poly {
    pub fn from_coeffs(mut c: Vec<Rat>) -> Self {
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        Poly(c)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(r: Rat) -> Self {
        Poly::from_coeffs(vec![r])
    }

    /// The indeterminate R.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.0.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![Rat::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            c[i] += a;
        }
        for (i, b) in o.0.iter().enumerate() {
            c[i] += b;
        }
        Poly::from_coeffs(c)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn scale(&self, r: &Rat) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|c| c * r).collect())
    }

    /// Euclidean division, returns (quotient, remainder).
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let dd = d.degree();
        let dl = d.leading();
        if rem.len() < d.0.len() {
            return (Poly::zero(), Poly(rem));
        }
        let mut quot = vec![Rat::zero(); rem.len() - d.0.len() + 1];
        while rem.len() >= d.0.len() && !rem.is_empty() {
            let k = rem.len() - d.0.len();
            let q = rem.last().unwrap() / &dl;
            quot[k] = q.clone();
            for (i, c) in d.0.iter().enumerate() {
                let v = c * &q;
                rem[k + i] -= v;
            }
            while rem.last().map(|x| x.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            // monic normalization
            let l = a.leading();
            a.scale(&(Rat::one() / l))
        }
    }
}

/// Element of ℚ(R): a reduced ratio of polynomials with monic denominator,
/// totally ordered by its sign as R → +∞ ("sufficiently large R").
#[derive(Debug, Clone)]
pub struct RatFn {
    num: Poly,
    den: Poly, // monic, nonzero
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in RatFn");
        let mut r = RatFn { num, den };
        r.reduce();
        r
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::constant(Rat::one());
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let l = self.den.leading();
        if !l.is_one() {
            let inv = Rat::one() / l;
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: Poly::constant(Rat::one()) }
    }

    pub fn constant(r: Rat) -> Self {
        RatFn::from_poly(Poly::constant(r))
    }

    /// The symbolic threshold R itself.
    pub fn var() -> Self {
        RatFn::from_poly(Poly::var())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    /// Substitute an explicit rational value for R. Panics if the value is a
    /// pole, which cannot happen for the slice data this crate constructs
    /// when R is chosen beyond every arrangement vertex.
    pub fn eval(&self, r: &Rat) -> Rat {
        let d = self.den.eval(r);
        assert!(!d.is_zero(), "RatFn pole at substituted R");
        self.num.eval(r) / d
    }

    fn sign_at_infinity(&self) -> Sign {
        if self.num.is_zero() {
            Sign::Zero
        } else {
            Sign::of(&self.num.leading())
        }
    }
}

impl PartialEq for RatFn {
    fn eq(&self, o: &Self) -> bool {
        // canonical form makes structural equality valid
        self.num == o.num && self.den == o.den
    }
}

impl Eq for RatFn {}

impl PartialOrd for RatFn {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for RatFn {
    fn cmp(&self, o: &Self) -> Ordering {
        let diff = self.clone() - o.clone();
        match diff.sign_at_infinity() {
            Sign::Neg => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Pos => Ordering::Greater,
        }
    }
}

impl Add for RatFn {
    type Output = RatFn;
    fn add(self, o: RatFn) -> RatFn {
        RatFn::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Sub for RatFn {
    type Output = RatFn;
    fn sub(self, o: RatFn) -> RatFn {
        RatFn::new(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl Mul for RatFn {
    type Output = RatFn;
    fn mul(self, o: RatFn) -> RatFn {
        RatFn::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Div for RatFn {
    type Output = RatFn;
    fn div(self, o: RatFn) -> RatFn {
        assert!(!o.num.is_zero(), "division by zero in ℚ(R)");
        RatFn::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den }
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFn {
    fn one() -> Self {
        RatFn::constant(Rat::one())
    }
}

impl Scalar for RatFn {
    fn from_rat(r: &Rat) -> Self {
        RatFn::constant(r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("-2").unwrap(), rat_i(-2));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rat("1/0").is_err());
        assert_eq!(rat_to_string(&rat(6, 4)), "3/2");
        assert_eq!(rat_to_string(&rat_i(7)), "7");
    }

    #[test]
    fn crat_integrality() {
        assert!(CRat::from_int(3).is_integer());
        assert!(!CRat::from_rat(rat(1, 2)).is_integer());
        assert!(!CRat::new(rat_i(1), rat(1, 3)).is_integer());
    }

    #[test]
    fn poly_division_and_gcd() {
        // (R^2 - 1) / (R - 1) = R + 1
        let p = Poly::from_coeffs(vec![rat_i(-1), rat_i(0), rat_i(1)]);
        let d = Poly::from_coeffs(vec![rat_i(-1), rat_i(1)]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_coeffs(vec![rat_i(1), rat_i(1)]));
        let g = p.gcd(&d);
        assert_eq!(g.degree(), 1);
    }

    #[test]
    fn ratfn_order_at_infinity() {
        let r = RatFn::var();
        let thousand = RatFn::constant(rat_i(1000));
        assert!(r > thousand);
        assert!(r.clone() * r.clone() > r.clone().mul(RatFn::constant(rat_i(999))));
        // 1/R is positive but smaller than every positive constant
        let inv = RatFn::one() / RatFn::var();
        assert!(inv > RatFn::zero());
        assert!(inv < RatFn::constant(rat(1, 1000000)));
        // reduction: (R^2-1)/(R-1) == R+1
        let p = RatFn::new(
            Poly::from_coeffs(vec![rat_i(-1), rat_i(0), rat_i(1)]),
            Poly::from_coeffs(vec![rat_i(-1), rat_i(1)]),
        );
        let q = RatFn::from_poly(Poly::from_coeffs(vec![rat_i(1), rat_i(1)]));
        assert_eq!(p, q);
    }

    #[test]
    fn ratfn_eval_substitution() {
        // (2R+1)/(R-3) at R=5 -> 11/2
        let f = RatFn::new(
            Poly::from_coeffs(vec![rat_i(1), rat_i(2)]),
            Poly::from_coeffs(vec![rat_i(-3), rat_i(1)]),
        );
        assert_eq!(f.eval(&rat_i(5)), rat(11, 2));
    }
}
