//! Univariate polynomials and rational functions over the Gaussian rationals,
//! with local Laurent expansions, orders and residues at finite points and
//! at infinity.
//!
//! A [`RationalFunction`] is kept in canonical form: numerator and
//! denominator coprime, denominator monic. When the denominator is known to
//! split into linear factors (everything built inside this crate), the
//! factorization is carried along so that cancellation is a handful of
//! synthetic divisions instead of a Euclidean gcd.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{ExactError, Gr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("function has a pole at {0}")]
    Pole(Gr),
    #[error("Schwarzian derivative of a constant map is undefined")]
    ConstantMap,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("bad polynomial exponent {0:?}")]
    BadExponent(String),
}

/// A point of the Riemann sphere: a finite Gaussian rational or `∞`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtendedPoint {
    Finite(Gr),
    Infinity,
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(p) => write!(f, "{p}"),
            ExtendedPoint::Infinity => write!(f, "oo"),
        }
    }
}

impl From<Gr> for ExtendedPoint {
    fn from(p: Gr) -> Self {
        ExtendedPoint::Finite(p)
    }
}

/// Dense polynomial, coefficients stored from the constant term upwards
/// with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Gr>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Gr::one())
    }

    pub fn constant(c: Gr) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `z`
    pub fn x() -> Self {
        Self::monomial(Gr::one(), 1)
    }

    pub fn monomial(c: Gr, degree: usize) -> Self {
        let mut coeffs = vec![Gr::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// `z - root`
    pub fn linear(root: &Gr) -> Self {
        Self::from_coeffs(vec![-root, Gr::one()])
    }

    /// `(z - root)^k`
    pub fn linear_power(root: &Gr, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_linear(root);
        }
        acc
    }

    pub fn from_coeffs(mut coeffs: Vec<Gr>) -> Self {
        while coeffs.last().is_some_and(Gr::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (usize, Gr)>>(terms: I) -> Self {
        let mut coeffs: Vec<Gr> = Vec::new();
        for (k, c) in terms {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Gr::zero());
            }
            coeffs[k] += &c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Gr] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Gr {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Gr> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, z: &Gr) -> Gr {
        let mut acc = Gr::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn scale(&self, c: &Gr) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => out.push(a + b),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Gr::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Self::from_coeffs(out)
    }

    /// `self · (z - root)`
    pub fn mul_linear(&self, root: &Gr) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = self.coeffs.len();
        let mut out = vec![Gr::zero(); n + 1];
        for k in 0..n {
            out[k + 1] += &self.coeffs[k];
            out[k] -= &(&self.coeffs[k] * root);
        }
        Self::from_coeffs(out)
    }

    /// Synthetic division by `z - root`: returns the quotient and the
    /// remainder `self(root)`.
    pub fn div_linear(&self, root: &Gr) -> (Self, Gr) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Gr::zero());
        }
        let n = self.coeffs.len();
        let mut q = vec![Gr::zero(); n - 1];
        let mut carry = Gr::zero();
        for k in (0..n).rev() {
            let v = &self.coeffs[k] + &(&carry * root);
            if k == 0 {
                return (Self::from_coeffs(q), v);
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// Multiplicity of `root` as a zero (0 if not a root). Panics on the zero
    /// polynomial.
    pub fn root_multiplicity(&self, root: &Gr) -> u32 {
        assert!(!self.is_zero(), "multiplicity of a root of the zero polynomial");
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_linear(root);
            if !r.is_zero() {
                return m;
            }
            p = q;
            m += 1;
        }
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Gr::from_integer(k as i64))
                .collect(),
        )
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.coeffs[d].inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Gr::zero(); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = &rem[k] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k - d + j] -= &(&c * dc);
            }
            quot[k - d] = c;
        }
        rem.truncate(d);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Taylor shift: the polynomial `w ↦ self(w + a)`.
    pub fn shift(&self, a: &Gr) -> Self {
        if a.is_zero() || self.coeffs.len() <= 1 {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a * &c[j + 1];
                c[j] += &t;
            }
        }
        Self::from_coeffs(c)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn to_map(&self) -> BTreeMap<i64, Gr> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64, c.clone()))
            .collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Polynomial {
    /// Exponent → coefficient map with exponents as decimal string keys.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let terms = self.to_map();
        let mut m = s.serialize_map(Some(terms.len()))?;
        for (k, c) in terms {
            m.serialize_entry(&k.to_string(), &c.to_string())?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, Gr>::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            let e: usize = k
                .trim()
                .parse()
                .map_err(|_| serde::de::Error::custom(RatFuncError::BadExponent(k.clone())))?;
            terms.push((e, c));
        }
        Ok(Polynomial::from_terms(terms))
    }
}

/// Truncated Laurent expansion of a function around a point, in the local
/// coordinate `z - P` (or `w = 1/z` at infinity).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    base: ExtendedPoint,
    start: i64,
    coeffs: Vec<Gr>,
    known_through: i64,
}

impl LaurentSeries {
    /// Builds a series from coefficients of exponents `start, start+1, …`;
    /// coefficients are known through `known_through`.
    pub fn new(base: ExtendedPoint, start: i64, mut coeffs: Vec<Gr>, known_through: i64) -> Self {
        let keep = (known_through - start + 1).max(0) as usize;
        coeffs.truncate(keep);
        coeffs.resize(keep, Gr::zero());
        let mut s = Self {
            base,
            start,
            coeffs,
            known_through,
        };
        s.trim_front();
        s
    }

    fn trim_front(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.start = self.known_through + 1;
            self.coeffs.clear();
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
    }

    pub fn base(&self) -> &ExtendedPoint {
        &self.base
    }

    pub fn known_through(&self) -> i64 {
        self.known_through
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn order(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Coefficient of the `k`-th power of the local coordinate. Panics when
    /// `k` lies beyond the truncation order.
    pub fn coeff(&self, k: i64) -> Gr {
        assert!(
            k <= self.known_through,
            "coefficient {k} requested beyond truncation order {}",
            self.known_through
        );
        if k < self.start {
            return Gr::zero();
        }
        self.coeffs[(k - self.start) as usize].clone()
    }

    /// Nonzero coefficients as an exponent map.
    pub fn terms(&self) -> BTreeMap<i64, Gr> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (self.start + k as i64, c.clone()))
            .collect()
    }

    /// Copy known only through `through` (which must not exceed the current
    /// truncation order).
    pub fn truncate(&self, through: i64) -> Self {
        assert!(through <= self.known_through, "cannot extend a truncated series");
        Self::new(self.base.clone(), self.start, self.coeffs.clone(), through)
    }

    pub fn scale(&self, c: &Gr) -> Self {
        Self::new(
            self.base.clone(),
            self.start,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.known_through,
        )
    }

    /// Sum, known through the smaller of the two truncation orders.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.base, other.base, "series at different points");
        let through = self.known_through.min(other.known_through);
        let start = self.start.min(other.start);
        let len = (through - start + 1).max(0) as usize;
        let coeffs = (0..len as i64)
            .map(|k| {
                let e = start + k;
                let a = if e >= self.start { self.coeff(e) } else { Gr::zero() };
                let b = if e >= other.start { other.coeff(e) } else { Gr::zero() };
                a + b
            })
            .collect();
        Self::new(self.base.clone(), start, coeffs, through)
    }

    /// Term-by-term derivative in the local coordinate.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.base.clone(),
            self.start - 1,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * &Gr::from_integer(self.start + k as i64))
                .collect(),
            self.known_through - 1,
        )
    }

    /// Product of two expansions at the same point, truncated to what both
    /// factors determine.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.base, other.base, "series at different points");
        let (Some(a0), Some(b0)) = (self.order(), other.order()) else {
            let through = match (self.order(), other.order()) {
                (None, None) => self.known_through + other.known_through + 1,
                (None, Some(b0)) => self.known_through + b0,
                (Some(a0), None) => other.known_through + a0,
                _ => unreachable!(),
            };
            return Self::new(self.base.clone(), through + 1, Vec::new(), through);
        };
        let through = (self.known_through + b0).min(other.known_through + a0);
        let len = (through - a0 - b0 + 1).max(0) as usize;
        let mut out = vec![Gr::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Self::new(self.base.clone(), a0 + b0, out, through)
    }
}

/// A rational function in canonical form.
#[derive(Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    /// Linear factorization of `den` when known, sorted by point.
    poles: Option<Vec<(Gr, u32)>>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RationalFunction {}

impl std::hash::Hash for RationalFunction {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

fn merge_poles(list: &mut Vec<(Gr, u32)>) {
    list.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let mut merged: Vec<(Gr, u32)> = Vec::with_capacity(list.len());
    for (p, m) in list.drain(..) {
        match merged.last_mut() {
            Some((q, n)) if *q == p => *n += m,
            _ => merged.push((p, m)),
        }
    }
    merged.retain(|(_, m)| *m > 0);
    *list = merged;
}

fn expand_poles(poles: &[(Gr, u32)]) -> Polynomial {
    let mut den = Polynomial::one();
    for (p, m) in poles {
        for _ in 0..*m {
            den = den.mul_linear(p);
        }
    }
    den
}

impl RationalFunction {
    pub fn zero() -> Self {
        Self::from_polynomial(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::constant(Gr::one())
    }

    pub fn constant(c: Gr) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    /// The coordinate function `z`.
    pub fn z() -> Self {
        Self::from_polynomial(Polynomial::x())
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
            poles: Some(Vec::new()),
        }
    }

    /// `num / den` reduced to canonical form.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RatFuncError> {
        if den.is_zero() {
            return Err(RatFuncError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero denominator").clone();
        let inv = lead.inv()?;
        let num = num.scale(&inv);
        let den = den.monic();
        let poles = den.is_constant().then(Vec::new);
        Ok(Self { num, den, poles })
    }

    /// `num / Π (z - p)^m` with the pole list given.
    pub fn from_factored(num: Polynomial, mut poles: Vec<(Gr, u32)>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        merge_poles(&mut poles);
        let mut num = num;
        for (p, m) in poles.iter_mut() {
            while *m > 0 {
                let (q, r) = num.div_linear(p);
                if !r.is_zero() {
                    break;
                }
                num = q;
                *m -= 1;
            }
        }
        poles.retain(|(_, m)| *m > 0);
        let den = expand_poles(&poles);
        Self {
            num,
            den,
            poles: Some(poles),
        }
    }

    /// `c · Π (z - p)^k` for integer exponents `k` of either sign.
    pub fn from_linear_factors(c: Gr, factors: &[(Gr, i64)]) -> Self {
        let mut num = Polynomial::constant(c);
        let mut poles = Vec::new();
        for (p, k) in factors {
            match k.cmp(&0) {
                Ordering::Greater => {
                    for _ in 0..*k {
                        num = num.mul_linear(p);
                    }
                }
                Ordering::Less => poles.push((p.clone(), k.unsigned_abs() as u32)),
                Ordering::Equal => {}
            }
        }
        Self::from_factored(num, poles)
    }

    /// Attempts to record a linear factorization of the denominator over the
    /// given candidate points.
    pub fn with_pole_hints(&self, candidates: &[Gr]) -> Self {
        if self.poles.is_some() {
            return self.clone();
        }
        let mut rest = self.den.clone();
        let mut poles = Vec::new();
        for p in candidates {
            let mut m = 0;
            loop {
                if rest.is_constant() {
                    break;
                }
                let (q, r) = rest.div_linear(p);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                m += 1;
            }
            if m > 0 {
                poles.push((p.clone(), m));
            }
        }
        let mut out = self.clone();
        if rest.is_constant() {
            merge_poles(&mut poles);
            out.poles = Some(poles);
        }
        out
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Finite poles with multiplicities, when the denominator is known to split.
    pub fn poles(&self) -> Option<&[(Gr, u32)]> {
        self.poles.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Gr> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
            poles: self.poles.clone(),
        }
    }

    pub fn scale(&self, c: &Gr) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
            poles: self.poles.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            return match &self.poles {
                Some(p) => Self::from_factored(num, p.clone()),
                None => Self::new(num, self.den.clone()).expect("nonzero denominator"),
            };
        }
        match (&self.poles, &other.poles) {
            (Some(pa), Some(pb)) => {
                let mut lcm: BTreeMap<usize, (Gr, u32)> = BTreeMap::new();
                let mut all: Vec<(Gr, u32)> = pa.iter().chain(pb.iter()).cloned().collect();
                all.sort_by(|a, b| a.0.lex_cmp(&b.0));
                let mut idx = 0;
                for (p, m) in all {
                    match lcm.get_mut(&idx) {
                        Some((q, n)) if *q == p => *n = (*n).max(m),
                        Some(_) => {
                            idx += 1;
                            lcm.insert(idx, (p, m));
                        }
                        None => {
                            lcm.insert(idx, (p, m));
                        }
                    }
                }
                let lcm: Vec<(Gr, u32)> = lcm.into_values().collect();
                let cofactor = |poles: &[(Gr, u32)]| {
                    let mut c = Polynomial::one();
                    for (p, m) in &lcm {
                        let have = poles
                            .iter()
                            .find(|(q, _)| q == p)
                            .map(|(_, k)| *k)
                            .unwrap_or(0);
                        for _ in have..*m {
                            c = c.mul_linear(p);
                        }
                    }
                    c
                };
                let num = self
                    .num
                    .mul(&cofactor(pa))
                    .add(&other.num.mul(&cofactor(pb)));
                Self::from_factored(num, lcm)
            }
            _ => Self::new(
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            )
            .expect("nonzero denominator"),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        match (&self.poles, &other.poles) {
            (Some(pa), Some(pb)) => {
                let poles: Vec<(Gr, u32)> = pa.iter().chain(pb.iter()).cloned().collect();
                Self::from_factored(self.num.mul(&other.num), poles)
            }
            _ => Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
                .expect("nonzero denominator"),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RatFuncError> {
        if other.is_zero() {
            return Err(RatFuncError::ZeroDenominator);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Exact derivative `d/dz`.
    pub fn derivative(&self) -> Self {
        match &self.poles {
            Some(poles) if !poles.is_empty() => {
                // (N/D)' = (N'·S - N·Σ m_r S/(z-r)) / (D·S) with S = Π (z-r).
                let s = expand_poles(&poles.iter().map(|(p, _)| (p.clone(), 1)).collect::<Vec<_>>());
                let mut log_part = Polynomial::zero();
                for (p, m) in poles {
                    let (s_over, _) = s.div_linear(p);
                    log_part = log_part.add(&s_over.scale(&Gr::from_integer(*m as i64)));
                }
                let num = self.num.derivative().mul(&s).sub(&self.num.mul(&log_part));
                let new_poles = poles.iter().map(|(p, m)| (p.clone(), m + 1)).collect();
                Self::from_factored(num, new_poles)
            }
            Some(_) => Self::from_polynomial(self.num.derivative()),
            None => Self::new(
                self.num
                    .derivative()
                    .mul(&self.den)
                    .sub(&self.num.mul(&self.den.derivative())),
                self.den.mul(&self.den),
            )
            .expect("nonzero denominator"),
        }
    }

    /// `n`-th derivative.
    pub fn nth_derivative(&self, n: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.derivative();
        }
        f
    }

    pub fn eval(&self, z: &Gr) -> Result<Gr, RatFuncError> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return Err(RatFuncError::Pole(z.clone()));
        }
        Ok(self.num.eval(z).checked_div(&d)?)
    }

    fn den_multiplicity(&self, p: &Gr) -> u32 {
        match &self.poles {
            Some(poles) => poles
                .iter()
                .find(|(q, _)| q == p)
                .map(|(_, m)| *m)
                .unwrap_or(0),
            None => self.den.root_multiplicity(p),
        }
    }

    /// Vanishing order at `point` (negative for poles); `None` for the zero
    /// function, whose order is `+∞`.
    pub fn order_at(&self, point: &ExtendedPoint) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(match point {
            ExtendedPoint::Finite(p) => {
                self.num.root_multiplicity(p) as i64 - self.den_multiplicity(p) as i64
            }
            ExtendedPoint::Infinity => {
                self.den.degree().unwrap_or(0) as i64 - self.num.degree().unwrap_or(0) as i64
            }
        })
    }

    /// Laurent expansion at `point` with every coefficient of exponent
    /// `≤ through` exact.
    pub fn local_expansion(&self, point: &ExtendedPoint, through: i64) -> LaurentSeries {
        if self.is_zero() {
            return LaurentSeries::new(point.clone(), through + 1, Vec::new(), through);
        }
        let (n, d) = match point {
            ExtendedPoint::Finite(p) => (self.num.shift(p), self.den.shift(p)),
            ExtendedPoint::Infinity => {
                let rev = |q: &Polynomial| {
                    Polynomial::from_coeffs(q.coeffs().iter().rev().cloned().collect())
                };
                // f(1/w) = w^(deg D - deg N) · rev(N)(w) / rev(D)(w)
                let shift = self.den.degree().unwrap_or(0) as i64
                    - self.num.degree().unwrap_or(0) as i64;
                return series_quotient(point.clone(), &rev(&self.num), &rev(&self.den), shift, through);
            }
        };
        let u = n.valuation().expect("nonzero numerator");
        let v = d.valuation().expect("nonzero denominator");
        let n1 = Polynomial::from_coeffs(n.coeffs()[u..].to_vec());
        let d1 = Polynomial::from_coeffs(d.coeffs()[v..].to_vec());
        series_quotient(point.clone(), &n1, &d1, u as i64 - v as i64, through)
    }

    /// Residue of the differential `f dz` at `point`. At infinity this is the
    /// residue in the chart `w = 1/z`, so the residues of `f dz` over all
    /// points of the sphere sum to zero.
    pub fn residue_at(&self, point: &ExtendedPoint) -> Gr {
        match point {
            ExtendedPoint::Finite(p) => {
                if self.den_multiplicity(p) == 0 {
                    return Gr::zero();
                }
                self.local_expansion(point, -1).coeff(-1)
            }
            ExtendedPoint::Infinity => {
                // f dz = -f(1/w) w^-2 dw
                -self.local_expansion(point, 1).coeff(1)
            }
        }
    }

    /// Finite poles with their orders. Splits the denominator over the known
    /// factorization only; returns `None` when it is unknown.
    pub fn finite_poles(&self) -> Option<Vec<(Gr, u32)>> {
        self.poles.clone()
    }
}

/// Series of `w^shift · n(w)/d(w)` with `d(0) ≠ 0`, through exponent `through`.
fn series_quotient(
    base: ExtendedPoint,
    n: &Polynomial,
    d: &Polynomial,
    shift: i64,
    through: i64,
) -> LaurentSeries {
    let count = through - shift + 1;
    if count <= 0 {
        return LaurentSeries::new(base, shift, Vec::new(), through);
    }
    let count = count as usize;
    let d0_inv = d.coeff(0).inv().expect("denominator nonvanishing at base point");
    let dc = d.coeffs();
    let nc = n.coeffs();
    let mut q: Vec<Gr> = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = nc.get(k).cloned().unwrap_or_default();
        for j in 1..dc.len().min(k + 1) {
            if !dc[j].is_zero() && !q[k - j].is_zero() {
                acc -= &(&dc[j] * &q[k - j]);
            }
        }
        q.push(&acc * &d0_inv);
    }
    LaurentSeries::new(base, shift, q, through)
}

/// Vanishing order of `f` at `p` (`None` for the zero function).
pub fn order_at(f: &RationalFunction, p: &ExtendedPoint) -> Option<i64> {
    f.order_at(p)
}

pub fn local_expansion(f: &RationalFunction, p: &ExtendedPoint, through: i64) -> LaurentSeries {
    f.local_expansion(p, through)
}

pub fn residue_at(f: &RationalFunction, p: &ExtendedPoint) -> Gr {
    f.residue_at(p)
}

pub fn derivative(f: &RationalFunction) -> RationalFunction {
    f.derivative()
}

/// `S(h) = h'''/h' - 3/2 (h''/h')²`.
pub fn schwarzian_derivative(h: &RationalFunction) -> Result<RationalFunction, RatFuncError> {
    let h1 = h.derivative();
    if h1.is_zero() {
        return Err(RatFuncError::ConstantMap);
    }
    let h2 = h1.derivative();
    let h3 = h2.derivative();
    let a = h3.checked_div(&h1)?;
    let b = h2.checked_div(&h1)?;
    Ok(a.sub(&b.mul(&b).scale(&Gr::ratio(3, 2))))
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Recursive-descent parser for rational expressions in `z` with Gaussian
/// rational constants: `+ - * / ^`, parentheses, integer literals, `I`
/// (or `i`) and implicit multiplication, e.g. `"(z-1)^-2 + 3/4*I*z"`.
struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn err(&self, msg: &str) -> RatFuncError {
        RatFuncError::Exact(ExactError::Parse(format!(
            "{msg} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        )))
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction, RatFuncError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, RatFuncError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).map_err(|_| self.err("division by zero"))?;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, RatFuncError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction, RatFuncError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            _ => false,
        };
        self.peek();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer exponent"))?;
        let p = base.pow(k);
        if neg {
            RationalFunction::one()
                .checked_div(&p)
                .map_err(|_| self.err("negative power of zero"))
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<RationalFunction, RatFuncError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(RationalFunction::z())
            }
            Some(b'I' | b'i') => {
                self.pos += 1;
                Ok(RationalFunction::constant(Gr::i()))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v: Gr = digits.parse()?;
                Ok(RationalFunction::constant(v))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl std::str::FromStr for RationalFunction {
    type Err = RatFuncError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ExprParser {
            src: s.as_bytes(),
            pos: 0,
        };
        let f = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionRepr {
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalFunctionRepr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalFunctionInput {
    Expr(String),
    Parts(RationalFunctionRepr),
}

impl<'de> Deserialize<'de> for RationalFunction {
    /// Accepts either an expression string such as `"1/(z-1)"` or an object
    /// `{"num": {...}, "den": {...}}`.
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RationalFunctionInput::deserialize(d)? {
            RationalFunctionInput::Expr(s) => s.parse().map_err(serde::de::Error::custom),
            RationalFunctionInput::Parts(r) => {
                RationalFunction::new(r.num, r.den).map_err(serde::de::Error::custom)
            }
        }
    }
}
