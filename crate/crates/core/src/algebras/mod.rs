//! Lie algebras and superalgebras built from forms: functions `A`, vector
//! fields `L`, differential operators `D¹ = A ⊕ L`, the superalgebra
//! `S = L ⊕ F^{-1/2}`, the Jordan superalgebra `F⁰ ⊕ F^{-1/2}`, and current
//! algebras `𝔤 ⊗ A`.

pub mod finite;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use thiserror::Error;

pub use finite::{FiniteLieAlgebra, FiniteLieError};

use crate::exactnum::{Gr, HalfInteger};
use crate::forms::{form_bracket, form_product, lie_derivative, FormSum, MeromorphicForm};
use crate::knbasis::{degrees_in, GradedIndex, KnBasis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element is not homogeneous in parity")]
    Inhomogeneous,
    #[error("Jordan product is defined on weights 0 and -1/2 only, got weight {0}")]
    JordanWeight(HalfInteger),
}

/// `0` for even, `1` for odd.
pub type Parity = u8;

/// A homogeneous basis vector of an almost-graded algebra.
#[derive(Clone, Debug)]
pub struct BasisVector<E> {
    pub degree: HalfInteger,
    pub label: String,
    pub element: E,
}

/// A Lie (super)algebra with an almost-graded basis.
pub trait LieAlgebra: Send + Sync {
    type Element: Clone + PartialEq + Debug + Send + Sync;

    fn bracket(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn add(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn scale(&self, a: &Self::Element, c: &Gr) -> Self::Element;
    fn zero(&self) -> Self::Element;
    fn is_zero(&self, a: &Self::Element) -> bool;

    /// Parity of a homogeneous element (`None` if mixed). Even by default.
    fn parity(&self, _a: &Self::Element) -> Option<Parity> {
        Some(0)
    }

    /// Homogeneous basis vectors whose degree lies in `[lo, hi]`.
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<Self::Element>>;

    fn sub(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        self.add(a, &self.scale(b, &-Gr::one()))
    }

    /// Graded Jacobi sum
    /// `(-1)^{ac}[a,[b,c]] + (-1)^{ba}[b,[c,a]] + (-1)^{cb}[c,[a,b]]`.
    fn jacobi_defect(
        &self,
        a: &Self::Element,
        b: &Self::Element,
        c: &Self::Element,
    ) -> Result<Self::Element, AlgebraError> {
        let pa = self.parity(a).ok_or(AlgebraError::Inhomogeneous)?;
        let pb = self.parity(b).ok_or(AlgebraError::Inhomogeneous)?;
        let pc = self.parity(c).ok_or(AlgebraError::Inhomogeneous)?;
        let sign = |x: Parity, y: Parity| {
            if x * y % 2 == 1 {
                -Gr::one()
            } else {
                Gr::one()
            }
        };
        let t1 = self.scale(&self.bracket(a, &self.bracket(b, c)), &sign(pa, pc));
        let t2 = self.scale(&self.bracket(b, &self.bracket(c, a)), &sign(pb, pa));
        let t3 = self.scale(&self.bracket(c, &self.bracket(a, b)), &sign(pc, pb));
        Ok(self.add(&self.add(&t1, &t2), &t3))
    }
}

fn h(n: i64) -> HalfInteger {
    HalfInteger::from_int(n)
}

fn forms_in_window(
    basis: &KnBasis,
    weight: HalfInteger,
    lo: HalfInteger,
    hi: HalfInteger,
) -> Vec<(HalfInteger, GradedIndex, MeromorphicForm)> {
    let mut out = Vec::new();
    for n in degrees_in(weight, lo, hi) {
        for p in 1..=basis.k() {
            let idx = GradedIndex {
                weight,
                degree: n,
                point: p,
            };
            out.push((n, idx, basis.form(&idx).expect("valid index")));
        }
    }
    out
}

/// The abelian Lie algebra `A` of functions.
#[derive(Clone, Debug)]
pub struct FunctionAlgebra {
    pub basis: Arc<KnBasis>,
}

impl LieAlgebra for FunctionAlgebra {
    type Element = MeromorphicForm;

    fn bracket(&self, _a: &MeromorphicForm, _b: &MeromorphicForm) -> MeromorphicForm {
        MeromorphicForm::zero(h(0))
    }
    fn add(&self, a: &MeromorphicForm, b: &MeromorphicForm) -> MeromorphicForm {
        a.add(b)
    }
    fn scale(&self, a: &MeromorphicForm, c: &Gr) -> MeromorphicForm {
        a.scale(c)
    }
    fn zero(&self) -> MeromorphicForm {
        MeromorphicForm::zero(h(0))
    }
    fn is_zero(&self, a: &MeromorphicForm) -> bool {
        a.is_zero()
    }
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<MeromorphicForm>> {
        forms_in_window(&self.basis, h(0), lo, hi)
            .into_iter()
            .map(|(degree, idx, element)| BasisVector {
                degree,
                label: format!("A({},{})", degree, idx.point),
                element,
            })
            .collect()
    }
}

/// The vector field algebra `L`.
#[derive(Clone, Debug)]
pub struct VectorFieldAlgebra {
    pub basis: Arc<KnBasis>,
}

impl LieAlgebra for VectorFieldAlgebra {
    type Element = MeromorphicForm;

    fn bracket(&self, a: &MeromorphicForm, b: &MeromorphicForm) -> MeromorphicForm {
        form_bracket(a, b)
    }
    fn add(&self, a: &MeromorphicForm, b: &MeromorphicForm) -> MeromorphicForm {
        a.add(b)
    }
    fn scale(&self, a: &MeromorphicForm, c: &Gr) -> MeromorphicForm {
        a.scale(c)
    }
    fn zero(&self) -> MeromorphicForm {
        MeromorphicForm::zero(h(-1))
    }
    fn is_zero(&self, a: &MeromorphicForm) -> bool {
        a.is_zero()
    }
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<MeromorphicForm>> {
        forms_in_window(&self.basis, h(-1), lo, hi)
            .into_iter()
            .map(|(degree, idx, element)| BasisVector {
                degree,
                label: format!("e({},{})", degree, idx.point),
                element,
            })
            .collect()
    }
}

/// `(g, e)` with `g` a function and `e` a vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct D1Element {
    pub function: MeromorphicForm,
    pub vector: MeromorphicForm,
}

impl D1Element {
    pub fn new(function: MeromorphicForm, vector: MeromorphicForm) -> Self {
        Self { function, vector }
    }

    pub fn from_function(g: MeromorphicForm) -> Self {
        Self::new(g, MeromorphicForm::zero(h(-1)))
    }

    pub fn from_vector(e: MeromorphicForm) -> Self {
        Self::new(MeromorphicForm::zero(h(0)), e)
    }
}

/// `[(g,e),(h,f)] = (e.h - f.g, [e,f])`.
pub fn d1_bracket(a: &D1Element, b: &D1Element) -> D1Element {
    let eh = lie_derivative(&a.vector, &b.function).expect("vector part has weight -1");
    let fg = lie_derivative(&b.vector, &a.function).expect("vector part has weight -1");
    D1Element::new(eh.sub(&fg), form_bracket(&a.vector, &b.vector))
}

/// The algebra `D¹` of differential operators of order at most one.
#[derive(Clone, Debug)]
pub struct DiffOpAlgebra {
    pub basis: Arc<KnBasis>,
}

impl LieAlgebra for DiffOpAlgebra {
    type Element = D1Element;

    fn bracket(&self, a: &D1Element, b: &D1Element) -> D1Element {
        d1_bracket(a, b)
    }
    fn add(&self, a: &D1Element, b: &D1Element) -> D1Element {
        D1Element::new(a.function.add(&b.function), a.vector.add(&b.vector))
    }
    fn scale(&self, a: &D1Element, c: &Gr) -> D1Element {
        D1Element::new(a.function.scale(c), a.vector.scale(c))
    }
    fn zero(&self) -> D1Element {
        D1Element::new(MeromorphicForm::zero(h(0)), MeromorphicForm::zero(h(-1)))
    }
    fn is_zero(&self, a: &D1Element) -> bool {
        a.function.is_zero() && a.vector.is_zero()
    }
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<D1Element>> {
        let f = FunctionAlgebra {
            basis: Arc::clone(&self.basis),
        };
        let v = VectorFieldAlgebra {
            basis: Arc::clone(&self.basis),
        };
        let mut out: Vec<BasisVector<D1Element>> = f
            .basis_in_window(lo, hi)
            .into_iter()
            .map(|b| BasisVector {
                degree: b.degree,
                label: b.label,
                element: D1Element::from_function(b.element),
            })
            .collect();
        out.extend(v.basis_in_window(lo, hi).into_iter().map(|b| BasisVector {
            degree: b.degree,
            label: b.label,
            element: D1Element::from_vector(b.element),
        }));
        out
    }
}

/// `(e, φ)`: even part a vector field, odd part a `-1/2`-form.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperElement {
    pub even: MeromorphicForm,
    pub odd: MeromorphicForm,
}

impl SuperElement {
    pub fn new(even: MeromorphicForm, odd: MeromorphicForm) -> Self {
        Self { even, odd }
    }

    pub fn from_even(e: MeromorphicForm) -> Self {
        Self::new(e, MeromorphicForm::zero(HalfInteger::from_twice(-1)))
    }

    pub fn from_odd(phi: MeromorphicForm) -> Self {
        Self::new(MeromorphicForm::zero(h(-1)), phi)
    }

    pub fn parity(&self) -> Option<Parity> {
        match (self.even.is_zero(), self.odd.is_zero()) {
            (_, true) => Some(0),
            (true, false) => Some(1),
            (false, false) => None,
        }
    }
}

/// Super bracket, extended bilinearly from `[e,f]`, `[e,φ] = e.φ`,
/// `[φ,e] = -e.φ` and `[φ,ψ] = φ·ψ`:
/// `[(e,φ),(f,ψ)] = ([e,f] + φ·ψ, e.ψ - f.φ)`.
pub fn super_bracket(a: &SuperElement, b: &SuperElement) -> SuperElement {
    let even = form_bracket(&a.even, &b.even).add(&form_product(&a.odd, &b.odd));
    let e_psi = lie_derivative(&a.even, &b.odd).expect("even part has weight -1");
    let f_phi = lie_derivative(&b.even, &a.odd).expect("even part has weight -1");
    SuperElement::new(even, e_psi.sub(&f_phi))
}

/// The Lie superalgebra `S = L ⊕ F^{-1/2}`.
#[derive(Clone, Debug)]
pub struct SuperAlgebra {
    pub basis: Arc<KnBasis>,
}

impl LieAlgebra for SuperAlgebra {
    type Element = SuperElement;

    fn bracket(&self, a: &SuperElement, b: &SuperElement) -> SuperElement {
        super_bracket(a, b)
    }
    fn add(&self, a: &SuperElement, b: &SuperElement) -> SuperElement {
        SuperElement::new(a.even.add(&b.even), a.odd.add(&b.odd))
    }
    fn scale(&self, a: &SuperElement, c: &Gr) -> SuperElement {
        SuperElement::new(a.even.scale(c), a.odd.scale(c))
    }
    fn zero(&self) -> SuperElement {
        SuperElement::from_even(MeromorphicForm::zero(h(-1)))
    }
    fn is_zero(&self, a: &SuperElement) -> bool {
        a.even.is_zero() && a.odd.is_zero()
    }
    fn parity(&self, a: &SuperElement) -> Option<Parity> {
        a.parity()
    }
    /// Even vectors of integral degree and odd vectors of half-odd degree in
    /// the window, each labelled by its own degree.
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<SuperElement>> {
        let mut out: Vec<BasisVector<SuperElement>> = forms_in_window(&self.basis, h(-1), lo, hi)
            .into_iter()
            .map(|(degree, idx, f)| BasisVector {
                degree,
                label: format!("e({},{})", degree, idx.point),
                element: SuperElement::from_even(f),
            })
            .collect();
        let half = HalfInteger::from_twice(-1);
        out.extend(forms_in_window(&self.basis, half, lo, hi).into_iter().map(
            |(degree, idx, f)| BasisVector {
                degree,
                label: format!("phi({},{})", degree, idx.point),
                element: SuperElement::from_odd(f),
            },
        ));
        out
    }
}

/// Homogeneous subspace `S_n = L_n ⊕ F^{-1/2}_{n+1/2}` for integral `n`.
pub fn super_block(basis: &KnBasis, n: i64) -> Vec<SuperElement> {
    let mut out = Vec::new();
    for p in 1..=basis.k() {
        let idx = GradedIndex {
            weight: h(-1),
            degree: h(n),
            point: p,
        };
        out.push(SuperElement::from_even(basis.form(&idx).expect("valid")));
    }
    for p in 1..=basis.k() {
        let idx = GradedIndex {
            weight: HalfInteger::from_twice(-1),
            degree: HalfInteger::from_twice(2 * n + 1),
            point: p,
        };
        out.push(SuperElement::from_odd(basis.form(&idx).expect("valid")));
    }
    out
}

/// Jordan superalgebra product on `F⁰ ⊕ F^{-1/2}`:
/// `f∘g = f·g`, `f∘φ = φ∘f = f·φ`, `φ∘ψ = [φ,ψ]`. With `antialgebra` the
/// mixed products are rescaled by `1/2`.
pub fn jordan_product(a: &FormSum, b: &FormSum, antialgebra: bool) -> Result<FormSum, AlgebraError> {
    let even = HalfInteger::from_int(0);
    let odd = HalfInteger::from_twice(-1);
    for w in a.weights().chain(b.weights()) {
        if w != even && w != odd {
            return Err(AlgebraError::JordanWeight(w));
        }
    }
    let (f, phi) = (a.component(even), a.component(odd));
    let (g, psi) = (b.component(even), b.component(odd));
    let mixed_scale = if antialgebra {
        Gr::ratio(1, 2)
    } else {
        Gr::one()
    };
    let mut out = FormSum::zero();
    out.add_form(form_product(&f, &g));
    out.add_form(form_product(&f, &psi).scale(&mixed_scale));
    out.add_form(form_product(&g, &phi).scale(&mixed_scale));
    out.add_form(form_bracket(&phi, &psi));
    Ok(out)
}

/// `Σ_i x_i ⊗ f_i` with functions `f_i`, keyed by basis index of `𝔤`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CurrentElement {
    terms: BTreeMap<usize, MeromorphicForm>,
}

impl CurrentElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `x_i ⊗ f`
    pub fn simple(i: usize, f: MeromorphicForm) -> Self {
        let mut e = Self::zero();
        e.add_term(i, f);
        e
    }

    pub fn add_term(&mut self, i: usize, f: MeromorphicForm) {
        if f.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&i) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(i, sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<usize, MeromorphicForm> {
        &self.terms
    }

    pub fn coefficient(&self, i: usize) -> MeromorphicForm {
        self.terms
            .get(&i)
            .cloned()
            .unwrap_or_else(|| MeromorphicForm::zero(h(0)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `[x⊗f, y⊗g] = [x,y] ⊗ f·g`, extended bilinearly.
pub fn current_bracket(a: &CurrentElement, b: &CurrentElement, g: &FiniteLieAlgebra) -> CurrentElement {
    let mut out = CurrentElement::zero();
    for (i, f) in &a.terms {
        for (j, gg) in &b.terms {
            let fg = form_product(f, gg);
            for (k, c) in g.bracket_basis(*i, *j).iter().enumerate() {
                if !c.is_zero() {
                    out.add_term(k, fg.scale(c));
                }
            }
        }
    }
    out
}

/// The current algebra `𝔤 ⊗ A`.
#[derive(Clone, Debug)]
pub struct CurrentAlgebra {
    pub basis: Arc<KnBasis>,
    pub g: Arc<FiniteLieAlgebra>,
}

impl LieAlgebra for CurrentAlgebra {
    type Element = CurrentElement;

    fn bracket(&self, a: &CurrentElement, b: &CurrentElement) -> CurrentElement {
        current_bracket(a, b, &self.g)
    }
    fn add(&self, a: &CurrentElement, b: &CurrentElement) -> CurrentElement {
        let mut out = a.clone();
        for (i, f) in &b.terms {
            out.add_term(*i, f.clone());
        }
        out
    }
    fn scale(&self, a: &CurrentElement, c: &Gr) -> CurrentElement {
        let mut out = CurrentElement::zero();
        for (i, f) in &a.terms {
            out.add_term(*i, f.scale(c));
        }
        out
    }
    fn zero(&self) -> CurrentElement {
        CurrentElement::zero()
    }
    fn is_zero(&self, a: &CurrentElement) -> bool {
        a.is_zero()
    }
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<CurrentElement>> {
        let mut out = Vec::new();
        for (degree, idx, f) in forms_in_window(&self.basis, h(0), lo, hi) {
            for (i, label) in self.g.labels().iter().enumerate() {
                out.push(BasisVector {
                    degree,
                    label: format!("{label}⊗A({},{})", degree, idx.point),
                    element: CurrentElement::simple(i, f.clone()),
                });
            }
        }
        out
    }
}

/// Number of basis vectors of each integral degree `n ∈ [lo, hi]`, grouping
/// odd vectors of degree `n + 1/2` with `n` for superalgebras.
pub fn homogeneous_dimensions<A: LieAlgebra>(alg: &A, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
    let mut counts: BTreeMap<i64, usize> = (lo..=hi).map(|n| (n, 0)).collect();
    let basis = alg.basis_in_window(h(lo), HalfInteger::from_twice(2 * hi + 1));
    for b in basis {
        let n = b.degree.floor();
        if let Some(c) = counts.get_mut(&n) {
            *c += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MarkedSphere;
    use crate::ratfunc::RationalFunction;

    fn g(n: i64) -> Gr {
        Gr::from_integer(n)
    }

    fn basis(points: &[i64]) -> Arc<KnBasis> {
        Arc::new(KnBasis::new(MarkedSphere::from_integers(points).unwrap()))
    }

    fn mono(tw: i64, k: i64) -> MeromorphicForm {
        MeromorphicForm::monomial(HalfInteger::from_twice(tw), g(1), k)
    }

    #[test]
    fn d1_examples() {
        let a = D1Element::from_function(mono(0, 2));
        let b = D1Element::from_function(mono(0, -3));
        let alg = DiffOpAlgebra { basis: basis(&[0]) };
        assert!(alg.is_zero(&d1_bracket(&a, &b)));
        let e1 = D1Element::from_vector(mono(-2, 2));
        let e2 = D1Element::from_vector(mono(-2, 0));
        assert_eq!(d1_bracket(&e1, &e2).vector, form_bracket(&e1.vector, &e2.vector));
        for n in -2..=2 {
            for m in -2..=2 {
                let e = D1Element::from_vector(mono(-2, n + 1));
                let f = D1Element::from_function(mono(0, m));
                let want = D1Element::from_function(mono(0, n + m).scale(&g(m)));
                assert_eq!(d1_bracket(&e, &f), want);
            }
        }
    }

    #[test]
    fn super_examples() {
        let phi = SuperElement::from_odd(mono(-1, 2));
        let psi = SuperElement::from_odd(mono(-1, -1));
        let b = super_bracket(&phi, &psi);
        assert_eq!(b.even, mono(-2, 1));
        assert_eq!(super_bracket(&psi, &phi), b);
        let e = SuperElement::from_even(mono(-2, 3));
        assert!(SuperAlgebra { basis: basis(&[0]) }.is_zero(&super_bracket(&e, &e)));
        // z d/dz acting on z^k (dz)^{-1/2} gives (k - 1/2) z^k.
        for k in -3..=3 {
            let euler = SuperElement::from_even(mono(-2, 1));
            let f = SuperElement::from_odd(mono(-1, k));
            let r = super_bracket(&euler, &f);
            assert_eq!(r.odd, mono(-1, k).scale(&(g(k) - Gr::ratio(1, 2))));
            assert_eq!(super_bracket(&f, &euler).odd, r.odd.neg());
        }
    }

    #[test]
    fn super_jacobi_exhaustive() {
        for pts in [vec![0], vec![0, 1]] {
            let alg = SuperAlgebra { basis: basis(&pts) };
            let vs = alg.basis_in_window(h(-2), h(2));
            for a in &vs {
                for b in &vs {
                    for c in &vs {
                        let d = alg.jacobi_defect(&a.element, &b.element, &c.element).unwrap();
                        assert!(alg.is_zero(&d), "{} {} {}", a.label, b.label, c.label);
                    }
                }
            }
            let mixed = SuperElement::new(mono(-2, 1), mono(-1, 1));
            assert_eq!(
                alg.jacobi_defect(&mixed, &vs[0].element, &vs[0].element),
                Err(AlgebraError::Inhomogeneous)
            );
        }
    }

    #[test]
    fn jordan_examples() {
        let f = FormSum::from_form(mono(0, 1));
        let gg = FormSum::from_form(mono(0, 2));
        assert_eq!(jordan_product(&f, &gg, false).unwrap(), FormSum::from_form(mono(0, 3)));
        let phi = FormSum::from_form(mono(-1, 1));
        assert_eq!(jordan_product(&f, &phi, false).unwrap(), FormSum::from_form(mono(-1, 2)));
        assert_eq!(jordan_product(&phi, &f, false).unwrap(), FormSum::from_form(mono(-1, 2)));
        assert_eq!(
            jordan_product(&f, &phi, true).unwrap(),
            FormSum::from_form(mono(-1, 2).scale(&Gr::ratio(1, 2)))
        );
        let psi = FormSum::from_form(mono(-1, 3));
        let pp = jordan_product(&phi, &psi, false).unwrap();
        let expect = form_bracket(&mono(-1, 1), &mono(-1, 3));
        assert_eq!(pp, FormSum::from_form(expect));
        assert!(jordan_product(&FormSum::from_form(mono(-2, 0)), &f, false).is_err());
    }

    #[test]
    fn current_examples() {
        let sl2 = Arc::new(FiniteLieAlgebra::sl2());
        for n in -3..=3 {
            for m in -3..=3 {
                let a = CurrentElement::simple(0, mono(0, n));
                let b = CurrentElement::simple(1, mono(0, m));
                assert_eq!(current_bracket(&a, &b, &sl2), CurrentElement::simple(2, mono(0, n + m)));
            }
        }
        let ab = FiniteLieAlgebra::abelian(2);
        let a = CurrentElement::simple(0, mono(0, 1));
        let b = CurrentElement::simple(1, mono(0, 1));
        assert!(current_bracket(&a, &b, &ab).is_zero());
        let alg = CurrentAlgebra { basis: basis(&[0, 1]), g: sl2 };
        let vs = alg.basis_in_window(h(-1), h(1));
        for a in &vs {
            for b in &vs {
                for c in vs.iter().step_by(2) {
                    assert!(alg.jacobi_defect(&a.element, &b.element, &c.element).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn current_bracket_leading_term() {
        let b = basis(&[0, 1]);
        let sl2 = FiniteLieAlgebra::sl2();
        for n in -2..=2 {
            for m in -2..=2 {
                for p in 1..=2 {
                    let x = b.form(&GradedIndex { weight: h(0), degree: h(n), point: p }).unwrap();
                    let y = b.form(&GradedIndex { weight: h(0), degree: h(m), point: p }).unwrap();
                    let r = current_bracket(&CurrentElement::simple(0, x), &CurrentElement::simple(1, y), &sl2);
                    let coeffs = b.expand(&r.coefficient(2)).unwrap();
                    let lead = GradedIndex { weight: h(0), degree: h(n + m), point: p };
                    assert_eq!(coeffs.get(&lead), Some(&g(1)));
                    assert!(coeffs.keys().all(|i| i.degree >= h(n + m)));
                }
            }
        }
    }

    #[test]
    fn d1_jacobi_random() {
        use rand::{Rng, SeedableRng};
        let b = basis(&[0, 1]);
        let alg = DiffOpAlgebra { basis: Arc::clone(&b) };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let vs = alg.basis_in_window(h(-2), h(2));
        let mut pick = || {
            let mut acc = alg.zero();
            for _ in 0..3 {
                let v = &vs[rng.gen_range(0..vs.len())];
                acc = alg.add(&acc, &alg.scale(&v.element, &g(rng.gen_range(-3..=3))));
            }
            acc
        };
        for _ in 0..10 {
            let (x, y, z) = (pick(), pick(), pick());
            assert!(alg.is_zero(&alg.jacobi_defect(&x, &y, &z).unwrap()));
        }
    }

    #[test]
    fn almost_graded_dimensions() {
        let sl2 = Arc::new(FiniteLieAlgebra::sl2());
        for k in 1..=3usize {
            let pts: Vec<i64> = (0..k as i64).collect();
            let b = basis(&pts);
            let dims = |d: BTreeMap<i64, usize>| d.values().copied().collect::<Vec<_>>();
            assert!(dims(homogeneous_dimensions(&VectorFieldAlgebra { basis: Arc::clone(&b) }, -2, 2)).iter().all(|&c| c == k));
            assert!(dims(homogeneous_dimensions(&FunctionAlgebra { basis: Arc::clone(&b) }, -2, 2)).iter().all(|&c| c == k));
            assert!(dims(homogeneous_dimensions(&SuperAlgebra { basis: Arc::clone(&b) }, -2, 2)).iter().all(|&c| c == 2 * k));
            assert!(dims(homogeneous_dimensions(&DiffOpAlgebra { basis: Arc::clone(&b) }, -2, 2)).iter().all(|&c| c == 2 * k));
            assert!(dims(homogeneous_dimensions(&CurrentAlgebra { basis: Arc::clone(&b), g: Arc::clone(&sl2) }, -2, 2)).iter().all(|&c| c == 3 * k));
            assert_eq!(super_block(&b, 0).len(), 2 * k);
        }
        let _ = RationalFunction::zero();
    }
}
