//! Exact arithmetic in the ring Z[1/2][u] with u = 2^{-1/q}.
//!
//! Every value is stored in a canonical form: `q` is the smallest denominator
//! that expresses it, so structural equality coincides with numeric equality.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

/// A dyadic rational `num / 2^exp`, normalized so that `num` is odd or `exp` is 0.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic { num: num.into(), exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic { num: v.into(), exp: 0 }
    }

    /// 2^{-k}
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic::new(1, k)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp as u64) as u32;
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Numerator after rescaling to denominator 2^exp (requires exp ≥ self.exp).
    fn scaled(&self, exp: u32) -> BigInt {
        &self.num << (exp - self.exp)
    }

    pub fn half(&self) -> Self {
        Dyadic::new(self.num.clone(), self.exp + 1)
    }

    pub fn abs(&self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        n / 2f64.powi(self.exp as i32)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled(e) + rhs.scaled(e), e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.scaled(e) - rhs.scaled(e), e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -&self.num, exp: self.exp }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `a`, `a/b` with `b` a power of two, `a/2^k`, and finite
    /// decimals such as `0.375` whose value is dyadic.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim();
            let exp = if let Some(k) = b.strip_prefix("2^") {
                k.parse::<u32>().map_err(|_| bad())?
            } else {
                let den: BigUint = b.parse().map_err(|_| bad())?;
                if den.is_zero() || (&den & (&den - 1u32)) != BigUint::zero() {
                    return Err(bad());
                }
                (den.bits() - 1) as u32
            };
            return Ok(Dyadic::new(num, exp));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let k = frac.len() as u32;
            // n / 10^k = n / (2^k 5^k); dyadic iff 5^k divides n.
            let five = BigInt::from(5u32).pow(k);
            let (q, r) = n.div_rem(&five);
            if !r.is_zero() {
                return Err(bad());
            }
            let d = Dyadic::new(q, k);
            return Ok(if neg { -&d } else { d });
        }
        let num: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Dyadic::from_int(num))
    }
}

/// A rational exponent s = p/q in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    p: u32,
    q: u32,
}

impl Exponent {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("exponent denominator must be positive".into()));
        }
        let g = p.gcd(&q).max(1);
        Ok(Exponent { p: p / g, q: q / g })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0
    }

    /// 2^{-s·k}
    pub fn pow2_neg(&self, k: u32) -> AlgebraicWeight {
        let total = self.p as u64 * k as u64;
        let a = (total / self.q as u64) as u32;
        let r = (total % self.q as u64) as usize;
        let mut coeffs = vec![Dyadic::zero(); self.q as usize];
        coeffs[r] = Dyadic::pow2_neg(a);
        AlgebraicWeight::from_parts(self.q, coeffs)
    }

    /// 2^{(1-s)·n}, the weight of the full level-n cover.
    pub fn level_cover(&self, n: u32) -> AlgebraicWeight {
        self.pow2_neg(n).mul_dyadic(&Dyadic::new(BigInt::one() << n, 0))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a rational exponent p/q: {s:?}"));
        match s.trim().split_once('/') {
            Some((p, q)) => {
                Exponent::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
            }
            None => Exponent::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Σ_j r_j u^j with u = 2^{-1/q} and u^q = 1/2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicWeight {
    q: u32,
    coeffs: Vec<Dyadic>,
}

impl Default for AlgebraicWeight {
    fn default() -> Self {
        AlgebraicWeight::zero()
    }
}

impl AlgebraicWeight {
    pub fn zero() -> Self {
        AlgebraicWeight { q: 1, coeffs: vec![Dyadic::zero()] }
    }

    pub fn one() -> Self {
        AlgebraicWeight::from_dyadic(Dyadic::one())
    }

    pub fn from_dyadic(d: Dyadic) -> Self {
        AlgebraicWeight { q: 1, coeffs: vec![d] }
    }

    /// Build from a ring degree and coefficients, reducing to canonical form.
    /// Coefficients beyond index q−1 are folded via u^q = 1/2.
    pub fn from_parts(q: u32, coeffs: Vec<Dyadic>) -> Self {
        assert!(q > 0, "ring degree must be positive");
        let q_us = q as usize;
        let mut folded = vec![Dyadic::zero(); q_us];
        for (k, c) in coeffs.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let halvings = (k / q_us) as u32;
            let term = Dyadic::new(c.num, c.exp + halvings);
            folded[k % q_us] = &folded[k % q_us] + &term;
        }
        Self::canonical(q, folded)
    }

    fn canonical(q: u32, coeffs: Vec<Dyadic>) -> Self {
        let mut g = q;
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(j as u32));
            }
        }
        if coeffs.iter().all(Dyadic::is_zero) {
            return AlgebraicWeight::zero();
        }
        if g <= 1 {
            return AlgebraicWeight { q, coeffs };
        }
        let nq = q / g;
        let mut out = vec![Dyadic::zero(); nq as usize];
        for (j, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                out[j / g as usize] = c;
            }
        }
        AlgebraicWeight { q: nq, coeffs: out }
    }

    /// u^k in the ring of degree q.
    pub fn u_pow(q: u32, k: u32) -> Self {
        let mut coeffs = vec![Dyadic::zero(); q as usize];
        coeffs[(k % q) as usize] = Dyadic::pow2_neg(k / q);
        AlgebraicWeight::canonical(q, coeffs)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.q == 1 && self.coeffs[0].is_zero()
    }

    /// The dyadic value when the weight is rational.
    pub fn as_dyadic(&self) -> Option<&Dyadic> {
        (self.q == 1).then(|| &self.coeffs[0])
    }

    /// Coefficients re-expressed over the degree-`q` ring (q a multiple of self.q).
    fn promoted(&self, q: u32) -> Vec<Dyadic> {
        debug_assert_eq!(q % self.q, 0);
        let step = (q / self.q) as usize;
        let mut out = vec![Dyadic::zero(); q as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * step] = c.clone();
        }
        out
    }

    fn common(&self, other: &Self) -> (u32, Vec<Dyadic>, Vec<Dyadic>) {
        let q = self.q.lcm(&other.q);
        (q, self.promoted(q), other.promoted(q))
    }

    pub fn mul_dyadic(&self, d: &Dyadic) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * d).collect();
        AlgebraicWeight::canonical(self.q, coeffs)
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        self.mul_dyadic(&Dyadic::from_int(k))
    }

    pub fn signum(&self) -> i32 {
        match self.cmp(&AlgebraicWeight::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Integer-scaled form: value = Σ a_j u^j / 2^e.
    fn integer_form(coeffs: &[Dyadic]) -> (Vec<BigInt>, u32) {
        let e = coeffs.iter().map(|c| c.exp).max().unwrap_or(0);
        (coeffs.iter().map(|c| c.scaled(e)).collect(), e)
    }

    /// Interval bounds on 2^{e + b(q−1)} · value at precision b.
    fn enclosure(q: u32, ints: &[BigInt], b: u32) -> (BigInt, BigInt) {
        let l = root_floor(q, b);
        let l1 = &l + 1u32;
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (j, a) in ints.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let shift = b as usize * (q as usize - 1 - j);
            let pl = BigInt::from(l.pow(j as u32)) << shift;
            let ph = BigInt::from(l1.pow(j as u32)) << shift;
            if a.is_positive() {
                lo += a * &pl;
                hi += a * &ph;
            } else {
                lo += a * &ph;
                hi += a * &pl;
            }
        }
        (lo, hi)
    }

    fn sign_of(q: u32, coeffs: &[Dyadic]) -> Ordering {
        if coeffs.iter().all(Dyadic::is_zero) {
            return Ordering::Equal;
        }
        if coeffs.iter().all(|c| c.signum() >= 0) {
            return Ordering::Greater;
        }
        if coeffs.iter().all(|c| c.signum() <= 0) {
            return Ordering::Less;
        }
        if q == 1 {
            return coeffs[0].signum().cmp(&0);
        }
        let (ints, _) = Self::integer_form(coeffs);
        let mut b = 64u32;
        loop {
            let (lo, hi) = Self::enclosure(q, &ints, b);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            b *= 2;
        }
    }

    /// Decimal expansion truncated toward zero to `digits` fractional digits.
    pub fn decimal(&self, digits: u32) -> String {
        let neg = self.signum() < 0;
        let abs = if neg { -self } else { self.clone() };
        let ten = BigInt::from(10u32).pow(digits);
        let int_part = if abs.q == 1 {
            let d = &abs.coeffs[0];
            (&d.num * &ten) >> d.exp as usize
        } else {
            let (ints, e) = Self::integer_form(&abs.coeffs);
            let mut b = 160u32;
            loop {
                let (lo, hi) = Self::enclosure(abs.q, &ints, b);
                let shift = e as usize + b as usize * (abs.q as usize - 1);
                let flo = (&lo * &ten) >> shift;
                let fhi = (&hi * &ten) >> shift;
                if flo == fhi {
                    break flo;
                }
                b *= 2;
            }
        };
        let s = int_part.to_string();
        let s = format!("{:0>width$}", s, width = digits as usize + 1);
        let (ip, fp) = s.split_at(s.len() - digits as usize);
        let sign = if neg && int_part > BigInt::zero() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.decimal(20).parse().unwrap_or(f64::NAN)
    }

    /// Ring literal `Q:r0,r1,...` (value Σ r_j 2^{-j/Q}).
    pub fn ring_literal(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("{}:{}", self.q, parts.join(","))
    }
}

/// floor(2^b · u) = floor((2^{bq−1})^{1/q}), cached per (q, b).
fn root_floor(q: u32, b: u32) -> BigUint {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), BigUint>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(q, b)) {
        return v.clone();
    }
    let radicand = BigUint::one() << (b as usize * q as usize - 1);
    let v = radicand.nth_root(q);
    cache.lock().unwrap().insert((q, b), v.clone());
    v
}

impl Ord for AlgebraicWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (q, a, b) = self.common(other);
        let diff: Vec<Dyadic> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        Self::sign_of(q, &diff)
    }
}

impl PartialOrd for AlgebraicWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trichotomous exact comparison.
pub fn compare(a: &AlgebraicWeight, b: &AlgebraicWeight) -> Ordering {
    a.cmp(b)
}

impl Add for &AlgebraicWeight {
    type Output = AlgebraicWeight;
    fn add(self, rhs: &AlgebraicWeight) -> AlgebraicWeight {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (q, a, b) = self.common(rhs);
        AlgebraicWeight::canonical(q, a.iter().zip(&b).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &AlgebraicWeight {
    type Output = AlgebraicWeight;
    fn sub(self, rhs: &AlgebraicWeight) -> AlgebraicWeight {
        let (q, a, b) = self.common(rhs);
        AlgebraicWeight::canonical(q, a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }
}

impl Mul for &AlgebraicWeight {
    type Output = AlgebraicWeight;
    fn mul(self, rhs: &AlgebraicWeight) -> AlgebraicWeight {
        let (q, a, b) = self.common(rhs);
        let mut out = vec![Dyadic::zero(); 2 * q as usize];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] = &out[i + j] + &(x * y);
                }
            }
        }
        AlgebraicWeight::from_parts(q, out)
    }
}

impl Neg for &AlgebraicWeight {
    type Output = AlgebraicWeight;
    fn neg(self) -> AlgebraicWeight {
        AlgebraicWeight { q: self.q, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for AlgebraicWeight {
            type Output = AlgebraicWeight;
            fn $f(self, rhs: AlgebraicWeight) -> AlgebraicWeight {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&AlgebraicWeight> for AlgebraicWeight {
            type Output = AlgebraicWeight;
            fn $f(self, rhs: &AlgebraicWeight) -> AlgebraicWeight {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicWeight {
    type Output = AlgebraicWeight;
    fn neg(self) -> AlgebraicWeight {
        -&self
    }
}

impl std::iter::Sum for AlgebraicWeight {
    fn sum<I: Iterator<Item = AlgebraicWeight>>(iter: I) -> Self {
        iter.fold(AlgebraicWeight::zero(), |acc, x| &acc + &x)
    }
}

impl From<Dyadic> for AlgebraicWeight {
    fn from(d: Dyadic) -> Self {
        AlgebraicWeight::from_dyadic(d)
    }
}

impl fmt::Display for AlgebraicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => c.to_string(),
                1 => format!("({c})·u"),
                _ => format!("({c})·u^{j}"),
            })
            .collect();
        write!(f, "{} [u=2^(-1/{})]", terms.join(" + "), self.q)
    }
}

impl fmt::Debug for AlgebraicWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈{})", self.ring_literal(), self.decimal(8))
    }
}

impl FromStr for AlgebraicWeight {
    type Err = Error;

    /// Dyadic literals (`3/4`, `1/2^5`, `0.75`, `2`) or ring literals `Q:r0,r1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((q, rest)) = s.split_once(':') {
            let q: u32 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad ring degree in {s:?}")))?;
            if q == 0 {
                return Err(Error::Parse(format!("ring degree must be positive in {s:?}")));
            }
            let coeffs = rest
                .split(',')
                .map(|c| c.parse::<Dyadic>())
                .collect::<Result<Vec<_>>>()?;
            return Ok(AlgebraicWeight::from_parts(q, coeffs));
        }
        Ok(AlgebraicWeight::from_dyadic(s.parse()?))
    }
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    q: u32,
    coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decimal: Option<String>,
}

impl Serialize for AlgebraicWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WeightRepr {
            q: self.q,
            coeffs: self.coeffs.iter().map(|c| format!("{}/2^{}", c.num, c.exp)).collect(),
            decimal: Some(self.decimal(30)),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraicWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Literal(String),
            Repr(WeightRepr),
        }
        match Either::deserialize(deserializer)? {
            Either::Literal(s) => s.parse().map_err(serde::de::Error::custom),
            Either::Repr(r) => {
                if r.q == 0 || r.coeffs.len() != r.q as usize {
                    return Err(serde::de::Error::custom("coefficient count must equal q"));
                }
                let coeffs = r
                    .coeffs
                    .iter()
                    .map(|c| c.parse::<Dyadic>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(serde::de::Error::custom)?;
                Ok(AlgebraicWeight::from_parts(r.q, coeffs))
            }
        }
    }
}

/// W_s(V) from a histogram of string lengths.
pub fn weight_of_lengths(counts: &BTreeMap<u32, BigUint>, s: Exponent) -> AlgebraicWeight {
    counts
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(&k, c)| s.pow2_neg(k).mul_int(BigInt::from(c.clone())))
        .sum()
}

/// W_s of an explicit string set.
pub fn weight_of_strings<'a, I>(strings: I, s: Exponent) -> AlgebraicWeight
where
    I: IntoIterator<Item = &'a crate::bits::BitString>,
{
    let mut counts: BTreeMap<u32, BigUint> = BTreeMap::new();
    for st in strings {
        *counts.entry(st.len() as u32).or_default() += 1u32;
    }
    weight_of_lengths(&counts, s)
}
