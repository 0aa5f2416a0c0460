//! Geometric 2-cocycles defined by residues over cycle classes, their
//! cocycle and locality checks, and the central extensions they define.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebras::{
    AlgebraError, BasisVector, CurrentAlgebra, CurrentElement, D1Element, DiffOpAlgebra,
    FunctionAlgebra, LieAlgebra, Parity, SuperAlgebra, SuperElement, VectorFieldAlgebra,
};
use crate::exactnum::{Gr, HalfInteger};
use crate::forms::{form_bracket, lie_derivative, MeromorphicForm};
use crate::geometry::{CycleClass, Geometry, GeometryError, MarkedSphere};
use crate::ratfunc::{ExtendedPoint, RationalFunction};

#[derive(Debug, Error)]
pub enum CocycleError {
    #[error("only 1-forms can be integrated, got weight {0}")]
    Weight(HalfInteger),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown cocycle kind '{0}' (expected psi1, psi2, psi3, psi4 or phi)")]
    UnknownKind(String),
    #[error("cocycle {kind} is not defined on {algebra}")]
    Unsupported { kind: CocycleKind, algebra: &'static str },
    #[error("cocycle condition fails on ({a}, {b}, {c}): defect {defect}")]
    NotACocycle {
        a: String,
        b: String,
        c: String,
        defect: Gr,
    },
}

/// `Σ_i m_i res_{P_i}(f dz)`.
fn integrate(sphere: &MarkedSphere, cycle: &CycleClass, f: &RationalFunction) -> Gr {
    let mut acc = Gr::zero();
    if f.is_zero() {
        return acc;
    }
    for (p, &m) in sphere.in_points().iter().zip(cycle.multiplicities()) {
        if m != 0 {
            acc += &(&f.residue_at(&ExtendedPoint::Finite(p.clone())) * &Gr::from_integer(m));
        }
    }
    acc
}

/// `∮_C ω` for a 1-form `ω`, normalized so that `∮ dz/z` around `0` is `1`.
pub fn integrate_over(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    omega: &MeromorphicForm,
) -> Result<Gr, CocycleError> {
    if omega.weight() != HalfInteger::from_int(1) {
        return Err(CocycleError::Weight(omega.weight()));
    }
    Ok(integrate(sphere, cycle, omega.rep()))
}

/// `ψ¹(g,h) = ∮ g dh`
pub fn psi1(sphere: &MarkedSphere, cycle: &CycleClass, g: &MeromorphicForm, h: &MeromorphicForm) -> Gr {
    integrate(sphere, cycle, &g.rep().mul(&h.rep().derivative()))
}

/// `ψ²(Σ x_i⊗g_i, Σ y_j⊗h_j) = Σ β(x_i,y_j) ψ¹(g_i,h_j)`
pub fn psi2(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    beta: &[Vec<Gr>],
    x: &CurrentElement,
    y: &CurrentElement,
) -> Gr {
    let mut acc = Gr::zero();
    for (i, g) in x.terms() {
        for (j, h) in y.terms() {
            let b = &beta[*i][*j];
            if !b.is_zero() {
                acc += &(b * &psi1(sphere, cycle, g, h));
            }
        }
    }
    acc
}

/// `ψ³(e,f) = ∮ [½(e‴f − ef‴) − R(e′f − ef′)] dz`
pub fn psi3(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    r: &RationalFunction,
    e: &MeromorphicForm,
    f: &MeromorphicForm,
) -> Gr {
    if e.is_zero() || f.is_zero() {
        return Gr::zero();
    }
    let (e, f) = (e.rep(), f.rep());
    let third = e.nth_derivative(3).mul(f).sub(&e.mul(&f.nth_derivative(3)));
    let mut integrand = third.scale(&Gr::ratio(1, 2));
    if !r.is_zero() {
        let first = e.derivative().mul(f).sub(&e.mul(&f.derivative()));
        integrand = integrand.sub(&r.mul(&first));
    }
    integrate(sphere, cycle, &integrand)
}

/// `ψ⁴(e,g) = ∮ (e g″ + T e g′) dz` for a vector field `e` and function `g`.
pub fn psi4(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    t: &RationalFunction,
    e: &MeromorphicForm,
    g: &MeromorphicForm,
) -> Gr {
    if e.is_zero() || g.is_zero() {
        return Gr::zero();
    }
    let (e, g) = (e.rep(), g.rep());
    let g1 = g.derivative();
    let mut integrand = e.mul(&g1.derivative());
    if !t.is_zero() {
        integrand = integrand.add(&t.mul(e).mul(&g1));
    }
    integrate(sphere, cycle, &integrand)
}

/// Odd part of the super cocycle: `−∮ (φ″ψ + φψ″ − Rφψ) dz`.
pub fn super_phi_odd(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    r: &RationalFunction,
    phi: &MeromorphicForm,
    psi: &MeromorphicForm,
) -> Gr {
    if phi.is_zero() || psi.is_zero() {
        return Gr::zero();
    }
    let (a, b) = (phi.rep(), psi.rep());
    let mut integrand = a.nth_derivative(2).mul(b).add(&a.mul(&b.nth_derivative(2)));
    if !r.is_zero() {
        integrand = integrand.sub(&r.mul(a).mul(b));
    }
    -integrate(sphere, cycle, &integrand)
}

/// Super cocycle `Φ`: `ψ³` on even pairs, the odd integral on odd pairs and
/// zero on mixed pairs, extended bilinearly.
pub fn super_phi(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    r: &RationalFunction,
    a: &SuperElement,
    b: &SuperElement,
) -> Gr {
    psi3(sphere, cycle, r, &a.even, &b.even) + super_phi_odd(sphere, cycle, r, &a.odd, &b.odd)
}

/// `ψ¹(e.g, h) + ψ¹(g, e.h)`
pub fn l_invariance_defect(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    e: &MeromorphicForm,
    g: &MeromorphicForm,
    h: &MeromorphicForm,
) -> Result<Gr, CocycleError> {
    let eg = lie_derivative(e, g).map_err(|_| CocycleError::Weight(e.weight()))?;
    let eh = lie_derivative(e, h).map_err(|_| CocycleError::Weight(e.weight()))?;
    Ok(psi1(sphere, cycle, &eg, h) + psi1(sphere, cycle, g, &eh))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CocycleKind {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    SuperPhi,
}

impl fmt::Display for CocycleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Psi1 => "psi1",
            Self::Psi2 => "psi2",
            Self::Psi3 => "psi3",
            Self::Psi4 => "psi4",
            Self::SuperPhi => "phi",
        })
    }
}

impl FromStr for CocycleKind {
    type Err = CocycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "psi1" => Ok(Self::Psi1),
            "psi2" => Ok(Self::Psi2),
            "psi3" => Ok(Self::Psi3),
            "psi4" => Ok(Self::Psi4),
            "phi" | "superphi" | "super_phi" => Ok(Self::SuperPhi),
            _ => Err(CocycleError::UnknownKind(s.to_string())),
        }
    }
}

/// A bilinear form on a Lie (super)algebra.
pub trait Cocycle<A: LieAlgebra>: Send + Sync {
    fn value(&self, alg: &A, x: &A::Element, y: &A::Element) -> Gr;

    /// Error when the form has no meaning on `A`.
    fn check_supported(&self) -> Result<(), CocycleError> {
        Ok(())
    }
}

/// A geometric cocycle: kind, integration cycle and connections.
#[derive(Clone, Debug)]
pub struct CocycleSpec {
    pub kind: CocycleKind,
    pub sphere: MarkedSphere,
    pub cycle: CycleClass,
    pub projective: RationalFunction,
    pub affine: RationalFunction,
}

impl CocycleSpec {
    /// Connections taken from `geom`; `cycle` must match its in-points.
    pub fn new(kind: CocycleKind, geom: &Geometry, cycle: CycleClass) -> Result<Self, CocycleError> {
        CycleClass::new(&geom.sphere, cycle.multiplicities().to_vec())?;
        Ok(Self {
            kind,
            sphere: geom.sphere.clone(),
            cycle,
            projective: geom.projective.clone(),
            affine: geom.affine.clone(),
        })
    }

    /// Over the separating cycle with zero connections.
    pub fn separating(kind: CocycleKind, sphere: &MarkedSphere) -> Self {
        Self {
            kind,
            sphere: sphere.clone(),
            cycle: crate::geometry::separating_cycle(sphere),
            projective: RationalFunction::zero(),
            affine: RationalFunction::zero(),
        }
    }

    fn unsupported(&self, algebra: &'static str) -> CocycleError {
        CocycleError::Unsupported {
            kind: self.kind,
            algebra,
        }
    }
}

impl Cocycle<FunctionAlgebra> for CocycleSpec {
    fn value(&self, _alg: &FunctionAlgebra, x: &MeromorphicForm, y: &MeromorphicForm) -> Gr {
        match self.kind {
            CocycleKind::Psi1 => psi1(&self.sphere, &self.cycle, x, y),
            _ => Gr::zero(),
        }
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        match self.kind {
            CocycleKind::Psi1 => Ok(()),
            _ => Err(self.unsupported("functions")),
        }
    }
}

impl Cocycle<VectorFieldAlgebra> for CocycleSpec {
    fn value(&self, _alg: &VectorFieldAlgebra, x: &MeromorphicForm, y: &MeromorphicForm) -> Gr {
        match self.kind {
            CocycleKind::Psi3 => psi3(&self.sphere, &self.cycle, &self.projective, x, y),
            _ => Gr::zero(),
        }
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        match self.kind {
            CocycleKind::Psi3 => Ok(()),
            _ => Err(self.unsupported("vector fields")),
        }
    }
}

impl Cocycle<DiffOpAlgebra> for CocycleSpec {
    fn value(&self, _alg: &DiffOpAlgebra, x: &D1Element, y: &D1Element) -> Gr {
        let (s, c) = (&self.sphere, &self.cycle);
        match self.kind {
            CocycleKind::Psi1 => psi1(s, c, &x.function, &y.function),
            CocycleKind::Psi3 => psi3(s, c, &self.projective, &x.vector, &y.vector),
            CocycleKind::Psi4 => {
                psi4(s, c, &self.affine, &x.vector, &y.function)
                    - psi4(s, c, &self.affine, &y.vector, &x.function)
            }
            _ => Gr::zero(),
        }
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        match self.kind {
            CocycleKind::Psi1 | CocycleKind::Psi3 | CocycleKind::Psi4 => Ok(()),
            _ => Err(self.unsupported("differential operators")),
        }
    }
}

impl Cocycle<SuperAlgebra> for CocycleSpec {
    fn value(&self, _alg: &SuperAlgebra, x: &SuperElement, y: &SuperElement) -> Gr {
        match self.kind {
            CocycleKind::SuperPhi => super_phi(&self.sphere, &self.cycle, &self.projective, x, y),
            CocycleKind::Psi3 => psi3(&self.sphere, &self.cycle, &self.projective, &x.even, &y.even),
            _ => Gr::zero(),
        }
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        match self.kind {
            CocycleKind::SuperPhi | CocycleKind::Psi3 => Ok(()),
            _ => Err(self.unsupported("the superalgebra")),
        }
    }
}

impl Cocycle<CurrentAlgebra> for CocycleSpec {
    fn value(&self, alg: &CurrentAlgebra, x: &CurrentElement, y: &CurrentElement) -> Gr {
        match self.kind {
            CocycleKind::Psi2 => psi2(&self.sphere, &self.cycle, alg.g.beta_matrix(), x, y),
            _ => Gr::zero(),
        }
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        match self.kind {
            CocycleKind::Psi2 => Ok(()),
            _ => Err(self.unsupported("current algebras")),
        }
    }
}

/// `Σ c_k ψ_k`
#[derive(Clone, Debug, Default)]
pub struct CocycleCombination {
    pub terms: Vec<(Gr, CocycleSpec)>,
}

impl CocycleCombination {
    pub fn new(terms: Vec<(Gr, CocycleSpec)>) -> Self {
        Self { terms }
    }
}

impl<A: LieAlgebra> Cocycle<A> for CocycleCombination
where
    CocycleSpec: Cocycle<A>,
{
    fn value(&self, alg: &A, x: &A::Element, y: &A::Element) -> Gr {
        self.terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| c * &s.value(alg, x, y))
            .sum()
    }
    fn check_supported(&self) -> Result<(), CocycleError> {
        self.terms.iter().try_for_each(|(_, s)| s.check_supported())
    }
}

/// The zero form, which gives the split extension.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroCocycle;

impl<A: LieAlgebra> Cocycle<A> for ZeroCocycle {
    fn value(&self, _alg: &A, _x: &A::Element, _y: &A::Element) -> Gr {
        Gr::zero()
    }
}

/// `ψ([x,y],z) + ψ([y,z],x) + ψ([z,x],y)`
pub fn cocycle_defect<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    psi: &C,
    x: &A::Element,
    y: &A::Element,
    z: &A::Element,
) -> Gr {
    psi.value(alg, &alg.bracket(x, y), z)
        + psi.value(alg, &alg.bracket(y, z), x)
        + psi.value(alg, &alg.bracket(z, x), y)
}

fn sign(a: Parity, b: Parity) -> Gr {
    if a * b % 2 == 1 {
        -Gr::one()
    } else {
        Gr::one()
    }
}

/// `(−1)^{x̄z̄} c(x,[y,z]) + (−1)^{ȳx̄} c(y,[z,x]) + (−1)^{z̄ȳ} c(z,[x,y])`
/// for homogeneous `x, y, z`.
pub fn super_cocycle_defect<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    c: &C,
    x: &A::Element,
    y: &A::Element,
    z: &A::Element,
) -> Result<Gr, CocycleError> {
    let px = alg.parity(x).ok_or(AlgebraError::Inhomogeneous)?;
    let py = alg.parity(y).ok_or(AlgebraError::Inhomogeneous)?;
    let pz = alg.parity(z).ok_or(AlgebraError::Inhomogeneous)?;
    Ok(&sign(px, pz) * &c.value(alg, x, &alg.bracket(y, z))
        + &sign(py, px) * &c.value(alg, y, &alg.bracket(z, x))
        + &sign(pz, py) * &c.value(alg, z, &alg.bracket(x, y)))
}

/// `c(e,[φ,ψ]) − c(φ, e.ψ) − c(ψ, e.φ)` for an even `e` and odd `φ, ψ`.
pub fn even_odd_odd_defect<C: Cocycle<SuperAlgebra> + ?Sized>(
    alg: &SuperAlgebra,
    c: &C,
    e: &SuperElement,
    phi: &SuperElement,
    psi: &SuperElement,
) -> Gr {
    c.value(alg, e, &alg.bracket(phi, psi))
        - c.value(alg, phi, &alg.bracket(e, psi))
        - c.value(alg, psi, &alg.bracket(e, phi))
}

/// The first triple of basis vectors (in index order `i ≤ j ≤ k`) on which
/// the graded cocycle condition fails, or the number of triples checked.
pub fn certify<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    c: &C,
    basis: &[BasisVector<A::Element>],
) -> Result<usize, CocycleError> {
    let n = basis.len();
    let brackets: Vec<Vec<A::Element>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| alg.bracket(&basis[i].element, &basis[j].element)).collect())
        .collect();
    let parities: Vec<Parity> = basis
        .iter()
        .map(|b| alg.parity(&b.element).ok_or(AlgebraError::Inhomogeneous))
        .collect::<Result<_, _>>()?;
    let failure = (0..n).into_par_iter().find_map_first(|i| {
        for j in i..n {
            for k in j..n {
                let (x, y, z) = (&basis[i].element, &basis[j].element, &basis[k].element);
                let (px, py, pz) = (parities[i], parities[j], parities[k]);
                let d = &sign(px, pz) * &c.value(alg, x, &brackets[j][k])
                    + &sign(py, px) * &c.value(alg, y, &brackets[k][i])
                    + &sign(pz, py) * &c.value(alg, z, &brackets[i][j]);
                if !d.is_zero() {
                    return Some(CocycleError::NotACocycle {
                        a: basis[i].label.clone(),
                        b: basis[j].label.clone(),
                        c: basis[k].label.clone(),
                        defect: d,
                    });
                }
            }
        }
        None
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(n * (n + 1) * (n + 2) / 6),
    }
}

/// Observed support `M1 ≤ n+m ≤ M2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalityWindow {
    pub m1: i64,
    pub m2: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityReport {
    /// Degree window `[lo, hi]` of the primary scan.
    pub window: (i64, i64),
    pub support: Option<LocalityWindow>,
    /// Support seen on the window widened by `growth` on both sides.
    pub grown_support: Option<LocalityWindow>,
    pub growth: i64,
    pub bounded_above: bool,
    pub bounded_below: bool,
}

impl LocalityReport {
    pub fn local(&self) -> bool {
        self.bounded_above && self.bounded_below
    }
}

/// Nonzero values of `c` on pairs of basis vectors with degrees in
/// `[lo, hi]`, keyed by the degree sum.
pub fn cocycle_support<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    c: &C,
    lo: i64,
    hi: i64,
) -> Vec<(String, String, HalfInteger, Gr)> {
    let basis = alg.basis_in_window(HalfInteger::from_int(lo), HalfInteger::from_twice(2 * hi + 1));
    let n = basis.len();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let basis = &basis;
            (0..n).filter_map(move |j| {
                let v = c.value(alg, &basis[i].element, &basis[j].element);
                (!v.is_zero()).then(|| {
                    (
                        basis[i].label.clone(),
                        basis[j].label.clone(),
                        basis[i].degree + basis[j].degree,
                        v,
                    )
                })
            })
        })
        .collect()
}

fn support_window<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    c: &C,
    lo: i64,
    hi: i64,
) -> Option<LocalityWindow> {
    let sums: Vec<i64> = cocycle_support(alg, c, lo, hi)
        .into_iter()
        .map(|(_, _, s, _)| s.floor())
        .collect();
    Some(LocalityWindow {
        m1: *sums.iter().min()?,
        m2: *sums.iter().max()?,
    })
}

/// Scans `[lo, hi]` and `[lo − growth, hi + growth]`; a side counts as
/// bounded when its extreme degree sum does not move.
pub fn locality_scan<A: LieAlgebra, C: Cocycle<A> + ?Sized>(
    alg: &A,
    c: &C,
    lo: i64,
    hi: i64,
    growth: i64,
) -> LocalityReport {
    let support = support_window(alg, c, lo, hi);
    let grown_support = support_window(alg, c, lo - growth, hi + growth);
    let (bounded_above, bounded_below) = match (support, grown_support) {
        (None, None) => (true, true),
        (Some(a), Some(b)) => (a.m2 == b.m2, a.m1 == b.m1),
        _ => (false, false),
    };
    LocalityReport {
        window: (lo, hi),
        support,
        grown_support,
        growth,
        bounded_above,
        bounded_below,
    }
}

/// `x̂ + c·t`
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedElement<E> {
    pub base: E,
    pub central: Gr,
}

/// `Â = A ⊕ ℂt` with `[x̂,ŷ] = [x,y]^ + s·ψ(x,y)·t` and `t` central.
pub struct CentralExtension<A: LieAlgebra, C: Cocycle<A>> {
    pub algebra: A,
    pub cocycle: C,
    /// Factor `s` applied to the cocycle.
    pub scale: Gr,
    /// Number of basis triples checked before construction.
    pub certified_triples: usize,
}

impl<A: LieAlgebra, C: Cocycle<A>> CentralExtension<A, C> {
    /// Certifies `ψ` on all basis triples with degrees in `[lo, hi]` and
    /// builds the extension, rescaling by `rescale` when given.
    pub fn new(algebra: A, cocycle: C, rescale: Option<Gr>, lo: i64, hi: i64) -> Result<Self, CocycleError> {
        cocycle.check_supported()?;
        let basis = algebra.basis_in_window(HalfInteger::from_int(lo), HalfInteger::from_twice(2 * hi + 1));
        let certified_triples = certify(&algebra, &cocycle, &basis)?;
        Ok(Self {
            algebra,
            cocycle,
            scale: rescale.unwrap_or_else(Gr::one),
            certified_triples,
        })
    }

    /// `−1/12`, the Virasoro normalization of `ψ³`.
    pub fn virasoro_scale() -> Gr {
        Gr::ratio(-1, 12)
    }

    pub fn lift(&self, x: A::Element) -> ExtendedElement<A::Element> {
        ExtendedElement {
            base: x,
            central: Gr::zero(),
        }
    }

    /// The central element `t`.
    pub fn central(&self) -> ExtendedElement<A::Element> {
        ExtendedElement {
            base: self.algebra.zero(),
            central: Gr::one(),
        }
    }
}

impl<A: LieAlgebra, C: Cocycle<A>> LieAlgebra for CentralExtension<A, C> {
    type Element = ExtendedElement<A::Element>;

    fn bracket(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        let alg = &self.algebra;
        ExtendedElement {
            base: alg.bracket(&a.base, &b.base),
            central: &self.scale * &self.cocycle.value(alg, &a.base, &b.base),
        }
    }
    fn add(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        ExtendedElement {
            base: self.algebra.add(&a.base, &b.base),
            central: &a.central + &b.central,
        }
    }
    fn scale(&self, a: &Self::Element, c: &Gr) -> Self::Element {
        ExtendedElement {
            base: self.algebra.scale(&a.base, c),
            central: &a.central * c,
        }
    }
    fn zero(&self) -> Self::Element {
        self.lift(self.algebra.zero())
    }
    fn is_zero(&self, a: &Self::Element) -> bool {
        self.algebra.is_zero(&a.base) && a.central.is_zero()
    }
    fn parity(&self, a: &Self::Element) -> Option<Parity> {
        if self.algebra.is_zero(&a.base) {
            Some(0)
        } else if a.central.is_zero() {
            self.algebra.parity(&a.base)
        } else {
            self.algebra.parity(&a.base).filter(|&p| p == 0)
        }
    }
    /// Basis of `A` in the window followed by `t` at degree 0.
    fn basis_in_window(&self, lo: HalfInteger, hi: HalfInteger) -> Vec<BasisVector<Self::Element>> {
        let mut out: Vec<BasisVector<Self::Element>> = self
            .algebra
            .basis_in_window(lo, hi)
            .into_iter()
            .map(|b| BasisVector {
                degree: b.degree,
                label: b.label,
                element: self.lift(b.element),
            })
            .collect();
        if lo <= HalfInteger::from_int(0) && HalfInteger::from_int(0) <= hi {
            out.push(BasisVector {
                degree: HalfInteger::from_int(0),
                label: "t".to_string(),
                element: self.central(),
            });
        }
        out
    }
}

/// `ψ³_R − ψ³_{R′}` evaluated at `(e, f)`: `−∮ (R − R′)(e′f − ef′)`.
pub fn projective_change(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    r: &RationalFunction,
    r_prime: &RationalFunction,
    e: &MeromorphicForm,
    f: &MeromorphicForm,
) -> Gr {
    psi3(sphere, cycle, r, e, f) - psi3(sphere, cycle, r_prime, e, f)
}

/// `∮ θ·[e,f]` for a quadratic differential `θ`: the coboundary of the
/// linear form `e ↦ ∮ θ e`.
pub fn coboundary_of(
    sphere: &MarkedSphere,
    cycle: &CycleClass,
    theta: &RationalFunction,
    e: &MeromorphicForm,
    f: &MeromorphicForm,
) -> Gr {
    let b = form_bracket(e, f);
    integrate(sphere, cycle, &theta.mul(b.rep()))
}

/// Shared handle used by callers that hold several algebras over one basis.
pub type SharedSpec = Arc<CocycleSpec>;
