//! Meromorphic `λ`-forms `f(z) dz^λ` on the marked sphere, stored by their
//! representative in the affine chart, with the associative product, the
//! Poisson bracket and the Lie derivative by vector fields.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{Gr, HalfInteger};
use crate::geometry::MarkedSphere;
use crate::ratfunc::{ExtendedPoint, Polynomial, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("expected a form of weight {expected}, got weight {got}")]
    WeightMismatch { expected: HalfInteger, got: HalfInteger },
    #[error("form has a pole at {point} (order {order}), outside the in-points")]
    PoleOutsideA { point: String, order: i64 },
}

/// `rep(z) dz^weight`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MeromorphicForm {
    weight: HalfInteger,
    rep: RationalFunction,
}

impl MeromorphicForm {
    pub fn new(weight: HalfInteger, rep: RationalFunction) -> Self {
        Self { weight, rep }
    }

    pub fn zero(weight: HalfInteger) -> Self {
        Self::new(weight, RationalFunction::zero())
    }

    /// A function (weight 0).
    pub fn function(rep: RationalFunction) -> Self {
        Self::new(HalfInteger::from_int(0), rep)
    }

    /// A vector field `rep d/dz` (weight −1).
    pub fn vector_field(rep: RationalFunction) -> Self {
        Self::new(HalfInteger::from_int(-1), rep)
    }

    /// `c · z^k dz^weight` for integer `k` of either sign.
    pub fn monomial(weight: HalfInteger, c: Gr, k: i64) -> Self {
        Self::new(
            weight,
            RationalFunction::from_linear_factors(c, &[(Gr::zero(), k)]),
        )
    }

    pub fn weight(&self) -> HalfInteger {
        self.weight
    }

    pub fn rep(&self) -> &RationalFunction {
        &self.rep
    }

    pub fn into_rep(self) -> RationalFunction {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    fn expect_weight(&self, w: HalfInteger) -> Result<(), FormError> {
        if self.weight != w {
            return Err(FormError::WeightMismatch {
                expected: w,
                got: self.weight,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FormError> {
        other.expect_weight(self.weight)?;
        Ok(Self::new(self.weight, self.rep.add(&other.rep)))
    }

    /// Sum of two forms of equal weight. Panics on a weight mismatch.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("adding forms of different weights")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.weight, self.rep.neg())
    }

    pub fn scale(&self, c: &Gr) -> Self {
        Self::new(self.weight, self.rep.scale(c))
    }

    /// Order of the form at a point; at `∞` the chart change
    /// `dz = -w⁻² dw` contributes `-2λ`.
    pub fn order_at(&self, point: &ExtendedPoint) -> Option<i64> {
        let ord = self.rep.order_at(point)?;
        Some(match point {
            ExtendedPoint::Finite(_) => ord,
            ExtendedPoint::Infinity => ord - self.weight.twice(),
        })
    }

    /// Checks that all finite poles sit at in-points.
    pub fn check_poles(&self, geom: &MarkedSphere) -> Result<(), FormError> {
        if self.rep.is_polynomial() {
            return Ok(());
        }
        let hinted = self.rep.with_pole_hints(geom.in_points());
        if hinted.poles().is_some() {
            return Ok(());
        }
        let mut rest = self.rep.den().clone();
        for q in geom.in_points() {
            for _ in 0..rest.root_multiplicity(q) {
                rest = rest.div_linear(q).0;
            }
        }
        Err(FormError::PoleOutsideA {
            point: format!("roots of {rest}"),
            order: -(rest.degree().unwrap_or(0) as i64),
        })
    }

    /// Re-attaches a linear factorization of the representative over the
    /// in-points when it was lost (e.g. after parsing).
    pub fn with_pole_hints(&self, geom: &MarkedSphere) -> Self {
        Self::new(self.weight, self.rep.with_pole_hints(geom.in_points()))
    }
}

impl fmt::Display for MeromorphicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) dz^{}", self.rep, self.weight)
    }
}

impl fmt::Debug for MeromorphicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    weight: HalfInteger,
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for MeromorphicForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FormRepr {
            weight: self.weight,
            num: self.rep.num().clone(),
            den: self.rep.den().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeromorphicForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        let rep = RationalFunction::new(r.num, r.den).map_err(serde::de::Error::custom)?;
        Ok(Self::new(r.weight, rep))
    }
}

/// `s · t`, of weight `λ + ν`.
pub fn form_product(s: &MeromorphicForm, t: &MeromorphicForm) -> MeromorphicForm {
    MeromorphicForm::new(s.weight + t.weight, s.rep.mul(&t.rep))
}

/// `[s, t] = ((-λ) s t' + ν t s') dz^{λ+ν+1}`.
pub fn form_bracket(s: &MeromorphicForm, t: &MeromorphicForm) -> MeromorphicForm {
    let weight = s.weight + t.weight + 1;
    if s.is_zero() || t.is_zero() {
        return MeromorphicForm::zero(weight);
    }
    let lam = -s.weight.to_gr();
    let nu = t.weight.to_gr();
    let mut rep = RationalFunction::zero();
    if !lam.is_zero() {
        rep = s.rep.mul(&t.rep.derivative()).scale(&lam);
    }
    if !nu.is_zero() {
        rep = rep.add(&t.rep.mul(&s.rep.derivative()).scale(&nu));
    }
    MeromorphicForm::new(weight, rep)
}

/// `e . g = (e g' + λ g e') dz^λ` for a vector field `e`.
pub fn lie_derivative(
    e: &MeromorphicForm,
    g: &MeromorphicForm,
) -> Result<MeromorphicForm, FormError> {
    e.expect_weight(HalfInteger::from_int(-1))?;
    if e.is_zero() || g.is_zero() {
        return Ok(MeromorphicForm::zero(g.weight));
    }
    let mut rep = e.rep.mul(&g.rep.derivative());
    let lam = g.weight.to_gr();
    if !lam.is_zero() {
        rep = rep.add(&g.rep.mul(&e.rep.derivative()).scale(&lam));
    }
    Ok(MeromorphicForm::new(g.weight, rep))
}

/// Element of `F = ⊕_λ F^λ`: at most one representative per weight.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct FormSum {
    terms: BTreeMap<HalfInteger, RationalFunction>,
}

impl FormSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_form(f: MeromorphicForm) -> Self {
        let mut s = Self::zero();
        s.add_form(f);
        s
    }

    pub fn add_form(&mut self, f: MeromorphicForm) {
        if f.is_zero() {
            return;
        }
        let w = f.weight;
        let sum = match self.terms.remove(&w) {
            Some(r) => r.add(&f.rep),
            None => f.rep,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = MeromorphicForm> + '_ {
        self.terms
            .iter()
            .map(|(w, r)| MeromorphicForm::new(*w, r.clone()))
    }

    pub fn component(&self, w: HalfInteger) -> MeromorphicForm {
        MeromorphicForm::new(w, self.terms.get(&w).cloned().unwrap_or_else(RationalFunction::zero))
    }

    pub fn weights(&self) -> impl Iterator<Item = HalfInteger> + '_ {
        self.terms.keys().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for f in other.components() {
            out.add_form(f);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, r)| (*w, r.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Gr) -> Self {
        let mut out = Self::zero();
        for f in self.components() {
            out.add_form(f.scale(c));
        }
        out
    }

    fn bilinear(
        &self,
        other: &Self,
        op: impl Fn(&MeromorphicForm, &MeromorphicForm) -> MeromorphicForm,
    ) -> Self {
        let mut out = Self::zero();
        for a in self.components() {
            for b in other.components() {
                out.add_form(op(&a, &b));
            }
        }
        out
    }

    pub fn product(&self, other: &Self) -> Self {
        self.bilinear(other, form_product)
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.bilinear(other, form_bracket)
    }
}

impl fmt::Debug for FormSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.components()).finish()
    }
}

/// Jacobi defect `[[a,b],c] + [[b,c],a] + [[c,a],b]` and Leibniz defect
/// `[a, b·c] - [a,b]·c - b·[a,c]`.
pub fn poisson_defects(a: &FormSum, b: &FormSum, c: &FormSum) -> (FormSum, FormSum) {
    let jacobi = a
        .bracket(b)
        .bracket(c)
        .add(&b.bracket(c).bracket(a))
        .add(&c.bracket(a).bracket(b));
    let leibniz = a
        .bracket(&b.product(c))
        .sub(&a.bracket(b).product(c))
        .sub(&b.product(&a.bracket(c)));
    (jacobi, leibniz)
}
