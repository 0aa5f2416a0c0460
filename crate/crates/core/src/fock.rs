//! Semi-infinite wedge forms over the `λ`-form basis: wedge and contraction
//! operators, the normal-ordered action of `D¹`, and the central term of
//! the resulting projective representation.
//!
//! Basis indices `(n, p)` of weight `λ` are numbered by the integer slot
//! `K(n − λ) + p − 1`, which is the lexicographic order on `(n, p)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::algebras::{d1_bracket, D1Element};
use crate::exactnum::{Gr, HalfInteger};
use crate::forms::{form_product, lie_derivative, MeromorphicForm};
use crate::knbasis::{BasisError, GradedIndex, KnBasis};

#[derive(Debug, Error)]
pub enum FockError {
    #[error("form has weight {got}, operator expects {expected}")]
    Weight { got: HalfInteger, expected: HalfInteger },
    #[error("degree {degree} is not a degree of weight {weight}")]
    Degree { weight: HalfInteger, degree: HalfInteger },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("commutator defect is not a multiple of the probe {probe}: stray term {stray}")]
    NotScalar { probe: String, stray: String },
    #[error("central term depends on the probe: {first} on {first_probe}, {second} on {second_probe}")]
    ProbeDependent {
        first_probe: String,
        first: Gr,
        second_probe: String,
        second: Gr,
    },
}

/// A semi-infinite wedge `f_{s_1} ∧ ⋯ ∧ f_{s_l} ∧ f_t ∧ f_{t+1} ∧ ⋯`
/// with `s_1 < ⋯ < s_l < t − 1`, stored by slot.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WedgeMonomial {
    prefix: Vec<i64>,
    tail_start: i64,
}

impl WedgeMonomial {
    /// Canonical monomial from a strictly increasing prefix and a tail start.
    pub fn new(mut prefix: Vec<i64>, mut tail_start: i64) -> Self {
        debug_assert!(prefix.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(prefix.last().is_none_or(|&s| s < tail_start));
        while prefix.last() == Some(&(tail_start - 1)) {
            prefix.pop();
            tail_start -= 1;
        }
        Self { prefix, tail_start }
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn tail_start(&self) -> i64 {
        self.tail_start
    }

    /// Smallest occupied slot.
    pub fn first(&self) -> i64 {
        self.prefix.first().copied().unwrap_or(self.tail_start)
    }

    pub fn contains(&self, s: i64) -> bool {
        s >= self.tail_start || self.prefix.binary_search(&s).is_ok()
    }

    /// Number of occupied slots below `s`.
    fn rank_below(&self, s: i64) -> usize {
        let in_prefix = self.prefix.partition_point(|&x| x < s);
        in_prefix + (s - self.tail_start).max(0) as usize
    }

    /// `f_s ∧ self` as (sign, monomial), or `None` if `s` is occupied.
    pub fn wedge(&self, s: i64) -> Option<(bool, Self)> {
        if self.contains(s) {
            return None;
        }
        let l = self.rank_below(s);
        let mut prefix = self.prefix.clone();
        prefix.insert(l, s);
        Some((l % 2 == 1, Self::new(prefix, self.tail_start)))
    }

    /// Removes slot `s` with sign `(−1)^{l−1}` for its 1-based position `l`.
    pub fn contract(&self, s: i64) -> Option<(bool, Self)> {
        if !self.contains(s) {
            return None;
        }
        let l = self.rank_below(s);
        let out = if s >= self.tail_start {
            let mut prefix = self.prefix.clone();
            prefix.extend(self.tail_start..s);
            Self::new(prefix, s + 1)
        } else {
            let mut prefix = self.prefix.clone();
            prefix.remove(l);
            Self::new(prefix, self.tail_start)
        };
        Some((l % 2 == 1, out))
    }
}

impl fmt::Display for WedgeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for s in &self.prefix {
            write!(f, "{s},")?;
        }
        write!(f, "{}..]", self.tail_start)
    }
}

impl fmt::Debug for WedgeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite linear combination of wedge monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockVector {
    terms: BTreeMap<WedgeMonomial, Gr>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_monomial(m: WedgeMonomial) -> Self {
        let mut v = Self::zero();
        v.add_term(m, Gr::one());
        v
    }

    pub fn add_term(&mut self, m: WedgeMonomial, c: Gr) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    fn add_signed(&mut self, m: WedgeMonomial, c: &Gr, negative: bool) {
        self.add_term(m, if negative { -c.clone() } else { c.clone() });
    }

    pub fn terms(&self) -> &BTreeMap<WedgeMonomial, Gr> {
        &self.terms
    }

    pub fn coefficient(&self, m: &WedgeMonomial) -> Gr {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Gr) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Gr::one()))
    }

    /// Applies a monomial-wise linear map.
    fn map(&self, f: impl Fn(&WedgeMonomial) -> FockVector + Sync) -> FockVector {
        let parts: Vec<FockVector> = self
            .terms
            .par_iter()
            .map(|(m, c)| f(m).scale(c))
            .collect();
        parts.into_iter().fold(Self::zero(), |acc, p| acc.add(&p))
    }
}

/// Wedge forms of weight `λ` over a marked sphere.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub basis: Arc<KnBasis>,
    pub lambda: HalfInteger,
}

impl FockSpace {
    pub fn new(basis: Arc<KnBasis>, lambda: HalfInteger) -> Self {
        Self { basis, lambda }
    }

    fn k(&self) -> i64 {
        self.basis.k() as i64
    }

    pub fn slot(&self, idx: &GradedIndex) -> Result<i64, FockError> {
        if idx.weight != self.lambda {
            return Err(FockError::Weight {
                got: idx.weight,
                expected: self.lambda,
            });
        }
        Ok(self.k() * idx.shifted_degree() + idx.point as i64 - 1)
    }

    /// Slot of `f^λ_{n,p}`.
    pub fn slot_of(&self, degree: HalfInteger, point: usize) -> Result<i64, FockError> {
        let idx = GradedIndex::new(self.lambda, degree, point).map_err(|_| FockError::Degree {
            weight: self.lambda,
            degree,
        })?;
        self.basis.sphere().check_point_index(point).map_err(BasisError::from)?;
        self.slot(&idx)
    }

    pub fn index(&self, slot: i64) -> GradedIndex {
        let k = self.k();
        GradedIndex {
            weight: self.lambda,
            degree: self.lambda + slot.div_euclid(k),
            point: slot.rem_euclid(k) as usize + 1,
        }
    }

    /// Slot of the dual partner of a `(1 − λ)`-basis index.
    fn dual_slot(&self, idx: &GradedIndex) -> Result<i64, FockError> {
        self.slot(&idx.dual())
    }

    /// `f^λ_{(T,1)} ∧ f^λ_{(T,2)} ∧ ⋯`
    pub fn vacuum(&self, t: HalfInteger) -> Result<WedgeMonomial, FockError> {
        Ok(WedgeMonomial::new(Vec::new(), self.slot_of(t, 1)?))
    }

    /// Monomials agreeing with the vacuum at slot `hi + 1` outside
    /// `[lo, hi]`: all subsets of `[lo, hi]` followed by the tail.
    pub fn monomials_between(&self, lo: i64, hi: i64) -> Vec<WedgeMonomial> {
        let width = (hi - lo + 1).max(0) as u32;
        (0u64..1 << width)
            .map(|mask| {
                let prefix = (0..width as i64)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| lo + b)
                    .collect();
                WedgeMonomial::new(prefix, hi + 1)
            })
            .collect()
    }

    /// `f ∧ v`
    pub fn wedge_op(&self, f: &MeromorphicForm, v: &FockVector) -> Result<FockVector, FockError> {
        let terms = self.slot_terms(f, self.lambda, |idx| self.slot(idx))?;
        Ok(v.map(|m| {
            let mut out = FockVector::zero();
            for (s, c) in &terms {
                if let Some((neg, w)) = m.wedge(*s) {
                    out.add_signed(w, c, neg);
                }
            }
            out
        }))
    }

    /// Contraction `ι_g v` with a `(1 − λ)`-form through the KN pairing.
    pub fn contraction_op(&self, g: &MeromorphicForm, v: &FockVector) -> Result<FockVector, FockError> {
        let terms = self.slot_terms(g, -self.lambda + 1, |idx| self.dual_slot(idx))?;
        Ok(v.map(|m| {
            let mut out = FockVector::zero();
            for (s, c) in &terms {
                if let Some((neg, w)) = m.contract(*s) {
                    out.add_signed(w, c, neg);
                }
            }
            out
        }))
    }

    fn slot_terms(
        &self,
        f: &MeromorphicForm,
        weight: HalfInteger,
        slot: impl Fn(&GradedIndex) -> Result<i64, FockError>,
    ) -> Result<Vec<(i64, Gr)>, FockError> {
        if f.is_zero() {
            return Ok(Vec::new());
        }
        if f.weight() != weight {
            return Err(FockError::Weight {
                got: f.weight(),
                expected: weight,
            });
        }
        self.basis
            .expand(f)?
            .iter()
            .map(|(idx, c)| Ok((slot(idx)?, c.clone())))
            .collect()
    }

    /// `x = (g, e)` acting on `λ`-forms by `f ↦ g·f + e.f`.
    pub fn act_on_form(&self, x: &D1Element, f: &MeromorphicForm) -> MeromorphicForm {
        let mut out = MeromorphicForm::zero(self.lambda);
        if !x.function.is_zero() {
            out = out.add(&form_product(&x.function, f));
        }
        if !x.vector.is_zero() {
            out = out.add(&lie_derivative(&x.vector, f).expect("vector part has weight -1"));
        }
        out
    }

    /// The normal-ordered operator of `x` relative to the vacuum tail at
    /// `reference`.
    pub fn operator(&self, x: &D1Element, reference: i64) -> Result<RegularizedOperator, FockError> {
        let lowest = [&x.function, &x.vector]
            .into_iter()
            .filter_map(|f| self.basis.support_bounds(f).map(|(lo, _)| lo))
            .min();
        let k = self.k();
        // x·f_{n,p} has degrees ≥ n + d for d the lowest degree in x.
        let min_shift = lowest.map(|d| k * d.floor() - (k - 1));
        Ok(RegularizedOperator {
            space: self.clone(),
            x: x.clone(),
            reference,
            min_shift,
            columns: Mutex::new(HashMap::new()),
        })
    }

    /// `ρ(x) v` with the normal ordering of [`FockSpace::operator`].
    pub fn regularized_action(&self, x: &D1Element, v: &FockVector, reference: i64) -> Result<FockVector, FockError> {
        self.operator(x, reference)?.apply(v)
    }

    /// `χ(x,y)` in `[ρ(x),ρ(y)] v = ρ([x,y]) v + χ(x,y) v` on a single probe.
    pub fn rep_cocycle(
        &self,
        x: &D1Element,
        y: &D1Element,
        probe: &WedgeMonomial,
        reference: i64,
    ) -> Result<Gr, FockError> {
        let v = FockVector::from_monomial(probe.clone());
        let rx = self.operator(x, reference)?;
        let ry = self.operator(y, reference)?;
        let rxy = self.operator(&d1_bracket(x, y), reference)?;
        let defect = rx
            .apply(&ry.apply(&v)?)?
            .sub(&ry.apply(&rx.apply(&v)?)?)
            .sub(&rxy.apply(&v)?);
        if let Some((stray, _)) = defect.terms().iter().find(|(m, _)| *m != probe) {
            return Err(FockError::NotScalar {
                probe: probe.to_string(),
                stray: stray.to_string(),
            });
        }
        Ok(defect.coefficient(probe))
    }

    /// `χ(x,y)` checked to agree on every probe.
    pub fn rep_cocycle_on(
        &self,
        x: &D1Element,
        y: &D1Element,
        probes: &[WedgeMonomial],
        reference: i64,
    ) -> Result<Gr, FockError> {
        let mut first: Option<(String, Gr)> = None;
        for p in probes {
            let c = self.rep_cocycle(x, y, p, reference)?;
            match &first {
                None => first = Some((p.to_string(), c)),
                Some((fp, fc)) if *fc != c => {
                    return Err(FockError::ProbeDependent {
                        first_probe: fp.clone(),
                        first: fc.clone(),
                        second_probe: p.to_string(),
                        second: c,
                    })
                }
                _ => {}
            }
        }
        Ok(first.map(|(_, c)| c).unwrap_or_default())
    }
}

/// `c_λ = −2(6λ² − 6λ + 1)`
pub fn central_charge(lambda: HalfInteger) -> Gr {
    let l = lambda.to_gr();
    let q = &(&l * &l) * &Gr::from_integer(6) - &(&l * &Gr::from_integer(6)) + Gr::one();
    &q * &Gr::from_integer(-2)
}

/// `ρ(x) = Σ a_{ba} :f_b ∧ ι_a:` where `x·f_a = Σ_b a_{ba} f_b`. Normal
/// ordering subtracts `a_{aa}` for every slot `a` occupied by the reference
/// vacuum, so that vacuum has zero diagonal eigenvalue. Matrix columns are
/// computed on demand and cached.
pub struct RegularizedOperator {
    space: FockSpace,
    x: D1Element,
    reference: i64,
    min_shift: Option<i64>,
    columns: Mutex<HashMap<i64, Arc<Vec<(i64, Gr)>>>>,
}

impl RegularizedOperator {
    /// Column `a`: the nonzero `a_{ba}`.
    pub fn column(&self, a: i64) -> Result<Arc<Vec<(i64, Gr)>>, FockError> {
        if let Some(c) = self.columns.lock().expect("column cache").get(&a) {
            return Ok(Arc::clone(c));
        }
        let f = self.space.basis.form(&self.space.index(a))?;
        let image = self.space.act_on_form(&self.x, &f);
        let col: Vec<(i64, Gr)> = self
            .space
            .basis
            .expand(&image)?
            .into_iter()
            .map(|(idx, c)| Ok((self.space.slot(&idx)?, c)))
            .collect::<Result<_, FockError>>()?;
        let col = Arc::new(col);
        self.columns
            .lock()
            .expect("column cache")
            .insert(a, Arc::clone(&col));
        Ok(col)
    }

    pub fn diagonal(&self, a: i64) -> Result<Gr, FockError> {
        Ok(self
            .column(a)?
            .iter()
            .find(|(b, _)| *b == a)
            .map(|(_, c)| c.clone())
            .unwrap_or_default())
    }

    pub fn apply_monomial(&self, m: &WedgeMonomial) -> Result<FockVector, FockError> {
        let mut out = FockVector::zero();
        let Some(min_shift) = self.min_shift else {
            return Ok(out);
        };
        let t = m.tail_start();
        // Diagonal part: Σ_{a<t0, a∈S} a_aa − Σ_{a≥t0, a∉S} a_aa.
        let mut diag = Gr::zero();
        for &a in m.prefix().iter().filter(|&&a| a < self.reference) {
            diag += &self.diagonal(a)?;
        }
        for a in t..self.reference {
            diag += &self.diagonal(a)?;
        }
        for a in self.reference..t {
            if !m.contains(a) {
                diag -= &self.diagonal(a)?;
            }
        }
        out.add_term(m.clone(), diag);
        // Off-diagonal part: a ∈ S moved to an empty slot b < t.
        let last = t - 1 - min_shift;
        let occupied = m.prefix().iter().copied().chain(t..=last.max(t - 1));
        for a in occupied.filter(|&a| a <= last) {
            for (b, c) in self.column(a)?.iter() {
                if *b == a || m.contains(*b) {
                    continue;
                }
                let (n1, mid) = m.contract(a).expect("occupied");
                let (n2, img) = mid.wedge(*b).expect("empty");
                out.add_signed(img, c, n1 ^ n2);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector, FockError> {
        let parts: Vec<FockVector> = v
            .terms()
            .iter()
            .map(|(m, c)| Ok(self.apply_monomial(m)?.scale(c)))
            .collect::<Result<_, FockError>>()?;
        Ok(parts.into_iter().fold(FockVector::zero(), |acc, p| acc.add(&p)))
    }
}

/// Classical `e_n = z^{n+1} d/dz` as an element of `D¹`.
pub fn witt_generator(n: i64) -> D1Element {
    D1Element::from_vector(MeromorphicForm::monomial(HalfInteger::from_int(-1), Gr::one(), n + 1))
}

/// Slots of a degree window `[lo, hi]` for weight `λ` on `K` points.
pub fn slot_window(space: &FockSpace, lo: HalfInteger, hi: HalfInteger) -> (i64, i64) {
    let k = space.k();
    let first = crate::knbasis::degrees_in(space.lambda, lo, hi);
    let (Some(a), Some(b)) = (first.first(), first.last()) else {
        return (0, -1);
    };
    let sa = k * (*a - space.lambda).to_integer().expect("parity");
    let sb = k * (*b - space.lambda).to_integer().expect("parity") + k - 1;
    (sa, sb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MarkedSphere;

    fn g(n: i64) -> Gr {
        Gr::from_integer(n)
    }

    fn space(points: &[i64], lambda_twice: i64) -> FockSpace {
        FockSpace::new(
            Arc::new(KnBasis::new(MarkedSphere::from_integers(points).unwrap())),
            HalfInteger::from_twice(lambda_twice),
        )
    }

    #[test]
    fn monomial_canonical_form() {
        let m = WedgeMonomial::new(vec![1, 3, 4], 5);
        assert_eq!(m, WedgeMonomial::new(vec![1], 3));
        assert!(m.contains(3) && !m.contains(2) && m.contains(100));
        let (neg, w) = m.wedge(2).unwrap();
        assert!(neg);
        assert_eq!(w, WedgeMonomial::new(vec![], 1));
        assert!(m.wedge(7).is_none());
        let (neg, c) = m.contract(5).unwrap();
        // occupied below 5: 1, 3, 4 → position 4, sign (−1)^3
        assert!(neg);
        assert_eq!(c, WedgeMonomial::new(vec![1, 3, 4], 6));
    }

    #[test]
    fn vacuum_operations() {
        let fs = space(&[0], 0);
        let t = HalfInteger::from_int(0);
        let vac = fs.vacuum(t).unwrap();
        assert_eq!(vac.tail_start(), 0);
        assert_ne!(vac, fs.vacuum(HalfInteger::from_int(1)).unwrap());
        let v = FockVector::from_monomial(vac.clone());
        let below = fs.basis.form(&fs.index(-1)).unwrap();
        let w = fs.wedge_op(&below, &v).unwrap();
        assert_eq!(w, FockVector::from_monomial(WedgeMonomial::new(vec![-1], 0)));
        let at = fs.basis.form(&fs.index(0)).unwrap();
        assert!(fs.wedge_op(&at, &v).unwrap().is_zero());
        assert!(fs.wedge_op(&below, &w).unwrap().is_zero());
        let dual = fs.basis.form(&fs.index(0).dual()).unwrap();
        let c = fs.contraction_op(&dual, &v).unwrap();
        assert_eq!(c, FockVector::from_monomial(WedgeMonomial::new(vec![], 1)));
        let far = fs.basis.form(&fs.index(-3).dual()).unwrap();
        assert!(fs.contraction_op(&far, &v).unwrap().is_zero());
    }

    #[test]
    fn clifford_relations_two_points() {
        let fs = space(&[0, 1], 1);
        let monos = fs.monomials_between(-2, 2);
        let slots: Vec<i64> = (-2..=2).collect();
        for &a in &slots {
            for &b in &slots {
                let fa = fs.basis.form(&fs.index(a)).unwrap();
                let gb = fs.basis.form(&fs.index(b).dual()).unwrap();
                for m in &monos {
                    let v = FockVector::from_monomial(m.clone());
                    let wc = fs.wedge_op(&fa, &fs.contraction_op(&gb, &v).unwrap()).unwrap();
                    let cw = fs.contraction_op(&gb, &fs.wedge_op(&fa, &v).unwrap()).unwrap();
                    let want = if a == b { v.clone() } else { FockVector::zero() };
                    assert_eq!(wc.add(&cw), want);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_telescoping() {
        let fs = space(&[0], 4);
        let e0 = witt_generator(0);
        let reference = 0;
        let op = fs.operator(&e0, reference).unwrap();
        for t in -3i64..=3 {
            let v = fs.vacuum(HalfInteger::from_int(t) + fs.lambda).unwrap();
            let w = fs.vacuum(HalfInteger::from_int(t + 1) + fs.lambda).unwrap();
            let ev = op.apply_monomial(&v).unwrap().coefficient(&v);
            let ew = op.apply_monomial(&w).unwrap().coefficient(&w);
            assert_eq!(ev - ew, op.diagonal(v.tail_start()).unwrap());
        }
        let vac = fs.vacuum(fs.lambda).unwrap();
        for n in 1..=3 {
            assert!(fs.regularized_action(&witt_generator(n), &FockVector::from_monomial(vac.clone()), reference).unwrap().is_zero());
        }
        let one = D1Element::from_function(MeromorphicForm::function(crate::ratfunc::RationalFunction::one()));
        for m in fs.monomials_between(-2, 1) {
            let r = fs.regularized_action(&one, &FockVector::from_monomial(m.clone()), reference).unwrap();
            assert!(r.terms().keys().all(|k| *k == m));
        }
    }

    #[test]
    fn classical_central_charge() {
        for lt in [0i64, 1, 2, 4] {
            let fs = space(&[0], lt);
            let vac = fs.vacuum(fs.lambda).unwrap();
            let probes = vec![vac.clone(), WedgeMonomial::new(vec![-2], 1)];
            let chi = |n: i64| fs.rep_cocycle_on(&witt_generator(n), &witt_generator(-n), &probes, 0).unwrap();
            let c1 = chi(1);
            let c = central_charge(fs.lambda);
            let mut sign = None;
            for n in 2..=4i64 {
                let reduced = chi(n) - &c1 * &g(n);
                let unit = &(&c * &g(n * n * n - n)) * &Gr::ratio(1, 12);
                let s = if reduced == unit { 1 } else if reduced == -unit.clone() { -1 } else { 0 };
                assert_ne!(s, 0, "λ={} n={n}: {reduced} vs {unit}", fs.lambda);
                assert!(sign.is_none_or(|x| x == s));
                sign = Some(s);
            }
        }
        assert_eq!(central_charge(HalfInteger::from_int(2)), g(-26));
    }
}
