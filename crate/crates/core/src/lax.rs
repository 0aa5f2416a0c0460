//! Lax operator algebras: matrix-valued rational functions with controlled
//! poles at Tyurin points, membership checks, construction of elements and
//! closure under the pointwise commutator.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebras::{current_bracket, CurrentElement, FiniteLieAlgebra};
use crate::exactnum::Gr;
use crate::forms::MeromorphicForm;
use crate::geometry::MarkedSphere;
use crate::linalg::{self, Mat};
use crate::ratfunc::{ExtendedPoint, RationalFunction};

#[derive(Debug, Error)]
pub enum LaxError {
    #[error("unknown matrix type '{0}' (expected gl<n>, sl<n>, so<n> or sp<2n>)")]
    UnknownType(String),
    #[error("invalid Tyurin data: {0}")]
    Tyurin(String),
    #[error("inconsistent parameters at point {point}: {constraint}")]
    Constraint { point: usize, constraint: String },
    #[error("bracket leaves the algebra: {0}")]
    Closure(LaxReport),
    #[error("matrix function has the wrong shape: {0}")]
    Shape(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// The matrix algebra `𝔤`; `Sp(n)` is `sp(2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaxType {
    Gl(usize),
    Sl(usize),
    So(usize),
    Sp(usize),
}

impl LaxType {
    /// Matrix size.
    pub fn size(&self) -> usize {
        match *self {
            Self::Gl(n) | Self::Sl(n) | Self::So(n) => n,
            Self::Sp(n) => 2 * n,
        }
    }

    pub fn algebra(&self) -> FiniteLieAlgebra {
        match *self {
            Self::Gl(n) => FiniteLieAlgebra::gl(n),
            Self::Sl(n) => FiniteLieAlgebra::sl(n),
            Self::So(n) => FiniteLieAlgebra::so(n),
            Self::Sp(n) => FiniteLieAlgebra::sp(n),
        }
    }

    /// Largest pole order allowed at a Tyurin point.
    pub fn max_pole(&self) -> i64 {
        match self {
            Self::Sp(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for LaxType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Gl(n) => write!(f, "gl{n}"),
            Self::Sl(n) => write!(f, "sl{n}"),
            Self::So(n) => write!(f, "so{n}"),
            Self::Sp(n) => write!(f, "sp{}", 2 * n),
        }
    }
}

impl FromStr for LaxType {
    type Err = LaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LaxError::UnknownType(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        let t: String = t.chars().filter(|c| !"()_".contains(*c)).collect();
        let (head, num) = t.split_at(t.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        let n: usize = num.parse().map_err(|_| bad())?;
        match head {
            "gl" if n >= 1 => Ok(Self::Gl(n)),
            "sl" if n >= 2 => Ok(Self::Sl(n)),
            "so" if n >= 2 => Ok(Self::So(n)),
            "sp" if n >= 2 && n % 2 == 0 => Ok(Self::Sp(n / 2)),
            _ => Err(bad()),
        }
    }
}

/// `(γ_s, α_s)`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TyurinPoint {
    pub gamma: Gr,
    pub alpha: Vec<Gr>,
}

/// Tyurin data `{(γ_s, α_s)}` for a matrix type, with the symplectic form
/// for `sp`.
#[derive(Clone, Debug, PartialEq)]
pub struct TyurinData {
    pub kind: LaxType,
    pub points: Vec<TyurinPoint>,
    pub sigma: Mat,
}

#[derive(Serialize, Deserialize)]
struct TyurinFile {
    #[serde(rename = "type")]
    kind: String,
    points: Vec<TyurinPoint>,
    #[serde(default)]
    sigma: Option<Mat>,
}

fn is_skew(m: &Mat) -> bool {
    linalg::is_zero_matrix(&linalg::mat_add(m, &linalg::transpose(m)))
}

impl TyurinData {
    /// Validates the data; `sigma` defaults to the standard form for `sp`.
    pub fn new(
        kind: LaxType,
        points: Vec<TyurinPoint>,
        sigma: Option<Mat>,
        sphere: &MarkedSphere,
    ) -> Result<Self, LaxError> {
        let n = kind.size();
        let sigma = match (kind, sigma) {
            (LaxType::Sp(h), None) => FiniteLieAlgebra::symplectic_form(h),
            (LaxType::Sp(_), Some(s)) => {
                if s.len() != n || s.iter().any(|r| r.len() != n) || !is_skew(&s) || linalg::rank(&s) != n {
                    return Err(LaxError::Tyurin("σ must be a nondegenerate skew matrix".into()));
                }
                s
            }
            (_, _) => linalg::zeros(0, 0),
        };
        for (i, p) in points.iter().enumerate() {
            if p.alpha.len() != n {
                return Err(LaxError::Tyurin(format!("α_{} has length {}, expected {n}", i + 1, p.alpha.len())));
            }
            if sphere.is_in_point(&p.gamma) {
                return Err(LaxError::Tyurin(format!("γ_{} = {} is an in-point", i + 1, p.gamma)));
            }
            if points[..i].iter().any(|q| q.gamma == p.gamma) {
                return Err(LaxError::Tyurin(format!("γ_{} = {} is repeated", i + 1, p.gamma)));
            }
            if matches!(kind, LaxType::So(_)) && !linalg::dot(&p.alpha, &p.alpha).is_zero() {
                return Err(LaxError::Tyurin(format!("α_{} is not isotropic (αᵗα ≠ 0)", i + 1)));
            }
        }
        Ok(Self { kind, points, sigma })
    }

    pub fn from_json_str(s: &str, sphere: &MarkedSphere) -> Result<Self, LaxError> {
        let f: TyurinFile = serde_json::from_str(s)?;
        Self::new(f.kind.parse()?, f.points, f.sigma, sphere)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "type": self.kind.to_string(),
            "points": self.points,
        });
        if matches!(self.kind, LaxType::Sp(_)) {
            v["sigma"] = serde_json::to_value(&self.sigma).expect("serializable");
        }
        v
    }

    /// Same points with every `α_s = 0`.
    pub fn with_zero_alpha(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.alpha = vec![Gr::zero(); self.kind.size()];
        }
        out
    }

    /// Whether a constant matrix lies in `𝔤`.
    pub fn in_algebra(&self, x: &Mat) -> bool {
        match self.kind {
            LaxType::Gl(_) => true,
            LaxType::Sl(_) => linalg::trace(x).is_zero(),
            LaxType::So(_) => is_skew(x),
            LaxType::Sp(_) => linalg::is_zero_matrix(&linalg::mat_add(
                &linalg::mat_mul(&linalg::transpose(x), &self.sigma),
                &linalg::mat_mul(&self.sigma, x),
            )),
        }
    }
}

/// Matrix of rational functions.
pub type MatrixFunction = Vec<Vec<RationalFunction>>;

pub fn matrix_zero(n: usize) -> MatrixFunction {
    vec![vec![RationalFunction::zero(); n]; n]
}

/// `f(z)·X`
pub fn matrix_times(f: &RationalFunction, x: &Mat) -> MatrixFunction {
    x.iter().map(|r| r.iter().map(|c| f.scale(c)).collect()).collect()
}

pub fn matrix_add(a: &MatrixFunction, b: &MatrixFunction) -> MatrixFunction {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn matrix_sub(a: &MatrixFunction, b: &MatrixFunction) -> MatrixFunction {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn matrix_product(a: &MatrixFunction, b: &MatrixFunction) -> MatrixFunction {
    let n = a.len();
    let mut out = matrix_zero(n);
    for i in 0..n {
        for (l, bl) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if !bl[j].is_zero() {
                    out[i][j] = out[i][j].add(&a[i][l].mul(&bl[j]));
                }
            }
        }
    }
    out
}

/// Pointwise commutator `[A, B]`.
pub fn matrix_commutator(a: &MatrixFunction, b: &MatrixFunction) -> MatrixFunction {
    matrix_sub(&matrix_product(a, b), &matrix_product(b, a))
}

fn is_zero_function_matrix(a: &MatrixFunction) -> bool {
    a.iter().all(|r| r.iter().all(RationalFunction::is_zero))
}

fn transpose_fn(a: &MatrixFunction) -> MatrixFunction {
    let n = a.len();
    (0..n).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

fn const_times_fn(x: &Mat, a: &MatrixFunction) -> MatrixFunction {
    let n = a.len();
    let mut out = matrix_zero(n);
    for i in 0..n {
        for l in 0..n {
            if x[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] = out[i][j].add(&a[l][j].scale(&x[i][l]));
            }
        }
    }
    out
}

/// One failed condition of the membership test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LaxViolation {
    /// 1-based Tyurin point, or `None` for global conditions.
    pub point: Option<usize>,
    pub constraint: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LaxReport {
    pub violations: Vec<LaxViolation>,
}

impl LaxReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, point: Option<usize>, constraint: &str, detail: impl Into<String>) {
        self.violations.push(LaxViolation {
            point,
            constraint: constraint.to_string(),
            detail: detail.into(),
        });
    }
}

impl fmt::Display for LaxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match v.point {
                Some(s) => write!(f, "at γ_{s}: {} ({})", v.constraint, v.detail)?,
                None => write!(f, "{} ({})", v.constraint, v.detail)?,
            }
        }
        Ok(())
    }
}

/// Coefficients `L_{s,k}` for `k = −2..=1`.
fn expansion_at(l: &MatrixFunction, gamma: &Gr) -> [Mat; 4] {
    let n = l.len();
    let mut out: [Mat; 4] = std::array::from_fn(|_| linalg::zeros(n, n));
    let pt = ExtendedPoint::Finite(gamma.clone());
    for i in 0..n {
        for j in 0..n {
            if l[i][j].is_zero() {
                continue;
            }
            let s = l[i][j].local_expansion(&pt, 1);
            for (k, m) in out.iter_mut().enumerate() {
                m[i][j] = s.coeff(k as i64 - 2);
            }
        }
    }
    out
}

/// Whether `target = Σ_j u_j·cols[j]` has a solution `u`, where `extra`
/// appends homogeneous rows `Σ_j row[j] u_j = 0`.
fn linear_exists(cols: &[Vec<Gr>], target: &[Gr], extra: &[Vec<Gr>]) -> bool {
    let rows = target.len();
    let mut a: Mat = (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let mut b = target.to_vec();
    for row in extra {
        a.push(row.clone());
        b.push(Gr::zero());
    }
    if cols.is_empty() {
        return b.iter().all(Gr::is_zero);
    }
    linalg::solve(&a, &b).is_some()
}

fn unit_vec(n: usize, j: usize) -> Vec<Gr> {
    let mut v = vec![Gr::zero(); n];
    v[j] = Gr::one();
    v
}

/// Checks every defining condition and reports all failures.
pub fn is_lax_element(l: &MatrixFunction, t: &TyurinData, sphere: &MarkedSphere) -> LaxReport {
    let mut report = LaxReport::default();
    let n = t.kind.size();
    if l.len() != n || l.iter().any(|r| r.len() != n) {
        report.push(None, "shape", format!("expected {n}×{n}"));
        return report;
    }
    // Poles only in W ∪ A.
    let allowed: Vec<Gr> = sphere
        .in_points()
        .iter()
        .cloned()
        .chain(t.points.iter().map(|p| p.gamma.clone()))
        .collect();
    for (i, row) in l.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            let mut d = f.den().clone();
            for q in &allowed {
                for _ in 0..d.root_multiplicity(q) {
                    d = d.div_linear(q).0;
                }
            }
            if d.degree().unwrap_or(0) > 0 {
                report.push(None, "poles in W ∪ A", format!("entry ({},{}) = {f}", i + 1, j + 1));
            }
        }
    }
    match t.kind {
        LaxType::Gl(_) => {}
        LaxType::Sl(_) => {
            let tr = (0..n).fold(RationalFunction::zero(), |acc, i| acc.add(&l[i][i]));
            if !tr.is_zero() {
                report.push(None, "tr L_{s,k} = 0", format!("trace {tr}"));
            }
        }
        LaxType::So(_) => {
            if !is_zero_function_matrix(&matrix_add(l, &transpose_fn(l))) {
                report.push(None, "L_{s,k} skew-symmetric", "L + Lᵗ ≠ 0");
            }
        }
        LaxType::Sp(_) => {
            let lhs = matrix_add(
                &transpose_fn(&const_times_fn(&linalg::transpose(&t.sigma), l)),
                &const_times_fn(&t.sigma, l),
            );
            if !is_zero_function_matrix(&lhs) {
                report.push(None, "Lᵗσ + σL = 0", "L ∉ sp");
            }
        }
    }
    for (s, tp) in t.points.iter().enumerate() {
        let sp = Some(s + 1);
        let pt = ExtendedPoint::Finite(tp.gamma.clone());
        let worst = l
            .iter()
            .flatten()
            .filter_map(|f| f.order_at(&pt))
            .min()
            .unwrap_or(0);
        if worst < -t.kind.max_pole() {
            report.push(sp, "pole order", format!("order {worst} below −{}", t.kind.max_pole()));
            continue;
        }
        let [lm2, lm1, l0, l1] = expansion_at(l, &tp.gamma);
        let alpha = &tp.alpha;
        match t.kind {
            LaxType::Gl(_) | LaxType::Sl(_) | LaxType::So(_) => {
                let skew = matches!(t.kind, LaxType::So(_));
                // β ↦ αβᵗ (− βαᵗ) as columns over the unit vectors.
                let cols: Vec<Vec<Gr>> = (0..n)
                    .map(|j| {
                        let e = unit_vec(n, j);
                        let mut m = linalg::outer(alpha, &e);
                        if skew {
                            m = linalg::mat_sub(&m, &linalg::outer(&e, alpha));
                        }
                        linalg::flatten(&m)
                    })
                    .collect();
                let target = linalg::flatten(&lm1);
                let tag = if skew { "L_{s,-1} = αβᵗ − βαᵗ" } else { "L_{s,-1} = αβᵗ" };
                if !linear_exists(&cols, &target, &[]) {
                    report.push(sp, tag, "no β");
                } else if !linear_exists(&cols, &target, &[alpha.clone()]) {
                    report.push(sp, "βᵗα = 0", "every admissible β has βᵗα ≠ 0");
                }
            }
            LaxType::Sp(_) => {
                let sigma = &t.sigma;
                let a_col = linalg::flatten(&linalg::mat_mul(&linalg::outer(alpha, alpha), sigma));
                if !linear_exists(&[a_col], &linalg::flatten(&lm2), &[]) {
                    report.push(sp, "L_{s,-2} = ν ααᵗσ", "no ν");
                }
                let cols: Vec<Vec<Gr>> = (0..n)
                    .map(|j| {
                        let e = unit_vec(n, j);
                        let sym = linalg::mat_add(&linalg::outer(alpha, &e), &linalg::outer(&e, alpha));
                        linalg::flatten(&linalg::mat_mul(&sym, sigma))
                    })
                    .collect();
                let target = linalg::flatten(&lm1);
                let sigma_alpha = linalg::mat_vec(sigma, alpha);
                if !linear_exists(&cols, &target, &[]) {
                    report.push(sp, "L_{s,-1} = (αβᵗ + βαᵗ)σ", "no β");
                } else if !linear_exists(&cols, &target, &[sigma_alpha.clone()]) {
                    report.push(sp, "βᵗσα = 0", "every admissible β has βᵗσα ≠ 0");
                }
                let v = linalg::mat_vec(&l1, alpha);
                let q = linalg::dot(&sigma_alpha, &v);
                // αᵗσ L α = −(σα)ᵗ L α
                if !q.is_zero() {
                    report.push(sp, "αᵗσ L_{s,1} α = 0", format!("value {}", -q));
                }
            }
        }
        let l0a = linalg::mat_vec(&l0, alpha);
        if !linear_exists(&[alpha.clone()], &l0a, &[]) {
            report.push(sp, "L_{s,0}α = κα", "α is not an eigenvector of L_{s,0}");
        }
    }
    report
}

/// Free data at one Tyurin point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub beta: Vec<Gr>,
    pub kappa: Gr,
    /// Coefficient of the double pole (`sp` only).
    #[serde(default)]
    pub nu: Gr,
}

/// Parameters of [`make_lax_element`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxParams {
    pub points: Vec<PointParams>,
    /// `tail[k]` multiplies `z^k`; each must lie in `𝔤`.
    #[serde(default)]
    pub tail: Vec<Mat>,
    /// `(p, k, X)` adds `X/(z − P_p)^k` at in-point `P_p` (1-based).
    #[serde(default)]
    pub in_point_poles: Vec<(usize, u32, Mat)>,
}

fn pole_term(at: &Gr, order: u32, x: &Mat) -> MatrixFunction {
    matrix_times(&RationalFunction::from_linear_factors(Gr::one(), &[(at.clone(), -(order as i64))]), x)
}

/// `l_s` with `l_s(γ_t) = δ_st`
fn lagrange(gammas: &[Gr], s: usize) -> RationalFunction {
    let mut c = Gr::one();
    let mut factors = Vec::new();
    for (t, g) in gammas.iter().enumerate() {
        if t != s {
            c = c.checked_div(&(&gammas[s] - g)).expect("distinct points");
            factors.push((g.clone(), 1));
        }
    }
    RationalFunction::from_linear_factors(c, &factors)
}

/// Builds an element with the requested singular parts, holomorphic tail
/// and eigenvalues: the value (and for `sp` the first derivative) at each
/// `γ_s` is corrected by Hermite interpolation inside `𝔤`.
pub fn make_lax_element(
    t: &TyurinData,
    params: &LaxParams,
    sphere: &MarkedSphere,
) -> Result<MatrixFunction, LaxError> {
    let n = t.kind.size();
    if params.points.len() != t.points.len() {
        return Err(LaxError::Shape(format!(
            "{} point parameters for {} Tyurin points",
            params.points.len(),
            t.points.len()
        )));
    }
    let g = t.kind.algebra();
    let gbasis = g.matrices().expect("matrix algebra");
    let check_in_g = |x: &Mat, what: &str| {
        if x.len() != n || x.iter().any(|r| r.len() != n) || !t.in_algebra(x) {
            Err(LaxError::Shape(format!("{what} is not an element of {}", t.kind)))
        } else {
            Ok(())
        }
    };
    let mut l = matrix_zero(n);
    for (k, x) in params.tail.iter().enumerate() {
        check_in_g(x, &format!("tail coefficient {k}"))?;
        let zk = RationalFunction::from_linear_factors(Gr::one(), &[(Gr::zero(), k as i64)]);
        l = matrix_add(&l, &matrix_times(&zk, x));
    }
    for (p, k, x) in &params.in_point_poles {
        check_in_g(x, "in-point pole coefficient")?;
        sphere
            .check_point_index(*p)
            .map_err(|e| LaxError::Shape(e.to_string()))?;
        l = matrix_add(&l, &pole_term(sphere.point(*p), *k, x));
    }
    for (s, (tp, pp)) in t.points.iter().zip(&params.points).enumerate() {
        let point = s + 1;
        let alpha = &tp.alpha;
        if pp.beta.len() != n {
            return Err(LaxError::Shape(format!("β_{point} has length {}", pp.beta.len())));
        }
        let beta = &pp.beta;
        let (s1, s2) = match t.kind {
            LaxType::Gl(_) | LaxType::Sl(_) | LaxType::So(_) => {
                if !linalg::dot(beta, alpha).is_zero() {
                    return Err(LaxError::Constraint {
                        point,
                        constraint: "βᵗα = 0".into(),
                    });
                }
                let mut m = linalg::outer(alpha, beta);
                if matches!(t.kind, LaxType::So(_)) {
                    m = linalg::mat_sub(&m, &linalg::outer(beta, alpha));
                }
                (m, None)
            }
            LaxType::Sp(_) => {
                let sa = linalg::mat_vec(&t.sigma, alpha);
                if !linalg::dot(beta, &sa).is_zero() {
                    return Err(LaxError::Constraint {
                        point,
                        constraint: "βᵗσα = 0".into(),
                    });
                }
                let sym = linalg::mat_add(&linalg::outer(alpha, beta), &linalg::outer(beta, alpha));
                let s1 = linalg::mat_mul(&sym, &t.sigma);
                let s2 = linalg::mat_scale(&linalg::mat_mul(&linalg::outer(alpha, alpha), &t.sigma), &pp.nu);
                (s1, Some(s2))
            }
        };
        l = matrix_add(&l, &pole_term(&tp.gamma, 1, &s1));
        if let Some(s2) = s2 {
            l = matrix_add(&l, &pole_term(&tp.gamma, 2, &s2));
        }
    }
    let gammas: Vec<Gr> = t.points.iter().map(|p| p.gamma.clone()).collect();
    let mut correction = matrix_zero(n);
    for (s, (tp, pp)) in t.points.iter().zip(&params.points).enumerate() {
        let point = s + 1;
        let alpha = &tp.alpha;
        let [_, _, b0, b1] = expansion_at(&l, &tp.gamma);
        // C ∈ 𝔤 with (B_0 + C)α = κα.
        let target: Vec<Gr> = linalg::mat_vec(&b0, alpha)
            .iter()
            .zip(alpha)
            .map(|(x, a)| &(&pp.kappa * a) - x)
            .collect();
        let a: Mat = (0..n)
            .map(|r| gbasis.iter().map(|x| linalg::mat_vec(x, alpha)[r].clone()).collect())
            .collect();
        let coeffs = linalg::solve(&a, &target).ok_or_else(|| LaxError::Constraint {
            point,
            constraint: "L_{s,0}α = κα".into(),
        })?;
        let c = combine(gbasis, &coeffs, n);
        let ls = lagrange(&gammas, s);
        let dls: Gr = gammas
            .iter()
            .enumerate()
            .filter(|(u, _)| *u != s)
            .map(|(_, g)| (&gammas[s] - g).inv().expect("distinct"))
            .sum();
        let ls2 = ls.mul(&ls);
        // ℓ_s = (1 − 2 l_s'(γ_s)(z − γ_s)) l_s², m_s = (z − γ_s) l_s²
        let zg = RationalFunction::from_linear_factors(Gr::one(), &[(tp.gamma.clone(), 1)]);
        let ell = RationalFunction::one().sub(&zg.scale(&(&dls * &Gr::from_integer(2)))).mul(&ls2);
        correction = matrix_add(&correction, &matrix_times(&ell, &c));
        if matches!(t.kind, LaxType::Sp(_)) {
            // D ∈ 𝔤 with (σα)ᵗ (B_1 + D) α = 0.
            let sa = linalg::mat_vec(&t.sigma, alpha);
            let row: Vec<Gr> = gbasis.iter().map(|x| linalg::dot(&sa, &linalg::mat_vec(x, alpha))).collect();
            let rhs = -linalg::dot(&sa, &linalg::mat_vec(&b1, alpha));
            let d = linalg::solve(&vec![row], &[rhs]).ok_or_else(|| LaxError::Constraint {
                point,
                constraint: "αᵗσ L_{s,1} α = 0".into(),
            })?;
            let dm = combine(gbasis, &d, n);
            correction = matrix_add(&correction, &matrix_times(&zg.mul(&ls2), &dm));
        }
    }
    Ok(matrix_add(&l, &correction))
}

fn combine(basis: &[Mat], coeffs: &[Gr], n: usize) -> Mat {
    basis
        .iter()
        .zip(coeffs)
        .fold(linalg::zeros(n, n), |acc, (x, c)| linalg::mat_add(&acc, &linalg::mat_scale(x, c)))
}

/// `[L₁, L₂]`, certified to satisfy the membership conditions.
pub fn lax_bracket(
    a: &MatrixFunction,
    b: &MatrixFunction,
    t: &TyurinData,
    sphere: &MarkedSphere,
) -> Result<MatrixFunction, LaxError> {
    let c = matrix_commutator(a, b);
    let report = is_lax_element(&c, t, sphere);
    if report.is_valid() {
        Ok(c)
    } else {
        Err(LaxError::Closure(report))
    }
}

/// `Σ_i f_i X_i` for `Σ_i x_i ⊗ f_i` in a matrix algebra.
pub fn current_to_matrix(x: &CurrentElement, g: &FiniteLieAlgebra) -> MatrixFunction {
    let mats = g.matrices().expect("matrix algebra");
    let n = mats.first().map_or(0, Vec::len);
    x.terms()
        .iter()
        .fold(matrix_zero(n), |acc, (i, f)| matrix_add(&acc, &matrix_times(f.rep(), &mats[*i])))
}

/// Isotropic vector `(x² − y², i(x² + y²), 2xy)` in `ℂ³`.
pub fn isotropic_vector(x: &Gr, y: &Gr) -> Vec<Gr> {
    let x2 = x * x;
    let y2 = y * y;
    vec![&x2 - &y2, &Gr::i() * &(&x2 + &y2), &(x * y) * &Gr::from_integer(2)]
}

fn small_gr(rng: &mut ChaCha8Rng) -> Gr {
    let re = Gr::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    let im = Gr::from_integer(rng.gen_range(-2..=2));
    &re + &(&Gr::i() * &im)
}

fn nonzero_gr(rng: &mut ChaCha8Rng) -> Gr {
    loop {
        let x = small_gr(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

fn random_in_algebra(g: &FiniteLieAlgebra, rng: &mut ChaCha8Rng) -> Mat {
    let basis = g.matrices().expect("matrix algebra");
    let coeffs: Vec<Gr> = basis.iter().map(|_| Gr::from_integer(rng.gen_range(-2..=2))).collect();
    combine(basis, &coeffs, basis[0].len())
}

/// `count` Tyurin points at random positions away from the in-points, with
/// random admissible `α_s`.
pub fn random_tyurin_data(
    kind: LaxType,
    count: usize,
    sphere: &MarkedSphere,
    rng: &mut ChaCha8Rng,
) -> Result<TyurinData, LaxError> {
    let n = kind.size();
    let mut points: Vec<TyurinPoint> = Vec::new();
    while points.len() < count {
        let gamma = small_gr(rng);
        if sphere.is_in_point(&gamma) || points.iter().any(|p| p.gamma == gamma) {
            continue;
        }
        let alpha = match kind {
            LaxType::So(3) => isotropic_vector(&nonzero_gr(rng), &nonzero_gr(rng)),
            _ => (0..n).map(|_| small_gr(rng)).collect(),
        };
        if alpha.iter().all(Gr::is_zero) {
            continue;
        }
        points.push(TyurinPoint { gamma, alpha });
    }
    TyurinData::new(kind, points, None, sphere)
}

/// `b` moved into the hyperplane `uᵗβ = 0`.
fn orthogonalize(b: Vec<Gr>, u: &[Gr]) -> Vec<Gr> {
    let Some(i) = u.iter().position(|x| !x.is_zero()) else {
        return b;
    };
    let shift = linalg::dot(&b, u).checked_div(&u[i]).expect("nonzero");
    let mut b = b;
    b[i] = &b[i] - &shift;
    b
}

/// Random admissible parameters for [`make_lax_element`].
pub fn random_params(t: &TyurinData, sphere: &MarkedSphere, rng: &mut ChaCha8Rng) -> LaxParams {
    let n = t.kind.size();
    let g = t.kind.algebra();
    let points = t
        .points
        .iter()
        .map(|tp| {
            let b: Vec<Gr> = (0..n).map(|_| small_gr(rng)).collect();
            let u = match t.kind {
                LaxType::Sp(_) => linalg::mat_vec(&t.sigma, &tp.alpha),
                _ => tp.alpha.clone(),
            };
            PointParams {
                beta: orthogonalize(b, &u),
                kappa: small_gr(rng),
                nu: small_gr(rng),
            }
        })
        .collect();
    let tail = (0..rng.gen_range(1..=2)).map(|_| random_in_algebra(&g, rng)).collect();
    let p = rng.gen_range(1..=sphere.k());
    let in_point_poles = vec![(p, rng.gen_range(1..=2), random_in_algebra(&g, rng))];
    LaxParams {
        points,
        tail,
        in_point_poles,
    }
}

/// Outcome of a randomized closure run.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub kind: String,
    pub seed: u64,
    pub pairs: usize,
    pub generated_valid: usize,
    pub brackets_valid: usize,
    pub jacobi_zero: usize,
    pub degeneration_exact: usize,
    pub failures: Vec<String>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Randomized certification: `pairs` random elements over two random Tyurin
/// points, checked for membership, closure of brackets, Jacobi on
/// consecutive triples, and `α = 0` agreement with the current algebra.
pub fn close_check(
    kind: LaxType,
    sphere: &MarkedSphere,
    seed: u64,
    pairs: usize,
) -> Result<ClosureReport, LaxError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_tyurin_data(kind, 2, sphere, &mut rng)?;
    let mut rep = ClosureReport {
        kind: kind.to_string(),
        seed,
        pairs,
        generated_valid: 0,
        brackets_valid: 0,
        jacobi_zero: 0,
        degeneration_exact: 0,
        failures: Vec::new(),
    };
    let mut elements = Vec::new();
    for _ in 0..2 * pairs {
        let l = make_lax_element(&t, &random_params(&t, sphere, &mut rng), sphere)?;
        let r = is_lax_element(&l, &t, sphere);
        if r.is_valid() {
            rep.generated_valid += 1;
        } else {
            rep.failures.push(format!("generated element invalid: {r}"));
        }
        elements.push(l);
    }
    for k in 0..pairs {
        match lax_bracket(&elements[2 * k], &elements[2 * k + 1], &t, sphere) {
            Ok(_) => rep.brackets_valid += 1,
            Err(e) => rep.failures.push(format!("pair {k}: {e}")),
        }
        let (a, b, c) = (&elements[2 * k], &elements[2 * k + 1], &elements[(2 * k + 2) % elements.len()]);
        let j = matrix_add(
            &matrix_add(
                &matrix_commutator(a, &matrix_commutator(b, c)),
                &matrix_commutator(b, &matrix_commutator(c, a)),
            ),
            &matrix_commutator(c, &matrix_commutator(a, b)),
        );
        if is_zero_function_matrix(&j) {
            rep.jacobi_zero += 1;
        } else {
            rep.failures.push(format!("pair {k}: Jacobi defect"));
        }
    }
    // α = 0: Lax elements are 𝔤-valued functions holomorphic outside A.
    let t0 = t.with_zero_alpha();
    let g = kind.algebra();
    for k in 0..pairs {
        let x = random_current(&g, sphere, &mut rng);
        let y = random_current(&g, sphere, &mut rng);
        let (mx, my) = (current_to_matrix(&x, &g), current_to_matrix(&y, &g));
        let expected = current_to_matrix(&current_bracket(&x, &y, &g), &g);
        match lax_bracket(&mx, &my, &t0, sphere) {
            Ok(b) if b == expected => rep.degeneration_exact += 1,
            Ok(_) => rep.failures.push(format!("degeneration {k}: bracket differs from current bracket")),
            Err(e) => rep.failures.push(format!("degeneration {k}: {e}")),
        }
    }
    Ok(rep)
}

fn random_current(g: &FiniteLieAlgebra, sphere: &MarkedSphere, rng: &mut ChaCha8Rng) -> CurrentElement {
    let mut x = CurrentElement::zero();
    for _ in 0..2 {
        let i = rng.gen_range(0..g.dim());
        let p = rng.gen_range(1..=sphere.k());
        let k = rng.gen_range(-2..=2i64);
        let f = RationalFunction::from_linear_factors(small_gr(rng), &[(sphere.point(p).clone(), k)]);
        x.add_term(i, MeromorphicForm::function(f));
    }
    x
}

#[derive(Deserialize)]
struct ElementFile {
    entries: Vec<Vec<RationalFunction>>,
}

/// Reads `{"entries": [["1/(z-1)", "0"], …]}`.
pub fn matrix_from_json_str(s: &str) -> Result<MatrixFunction, LaxError> {
    let f: ElementFile = serde_json::from_str(s)?;
    let n = f.entries.len();
    if f.entries.iter().any(|r| r.len() != n) {
        return Err(LaxError::Shape("entries must form a square matrix".into()));
    }
    Ok(f.entries)
}

pub fn matrix_to_json_value(m: &MatrixFunction) -> serde_json::Value {
    serde_json::json!({
        "entries": m.iter().map(|r| r.iter().map(|f| f.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> Gr {
        Gr::from_integer(n)
    }

    fn sphere() -> MarkedSphere {
        MarkedSphere::from_integers(&[0, 1]).unwrap()
    }

    fn gl2_data() -> TyurinData {
        TyurinData::new(
            LaxType::Gl(2),
            vec![TyurinPoint {
                gamma: g(3),
                alpha: vec![g(1), g(0)],
            }],
            None,
            &sphere(),
        )
        .unwrap()
    }

    #[test]
    fn parse_types() {
        assert_eq!("gl2".parse::<LaxType>().unwrap(), LaxType::Gl(2));
        assert_eq!("sp(4)".parse::<LaxType>().unwrap(), LaxType::Sp(2));
        assert_eq!("so3".parse::<LaxType>().unwrap(), LaxType::So(3));
        assert!("sp3".parse::<LaxType>().is_err());
        assert!("xx2".parse::<LaxType>().is_err());
    }

    #[test]
    fn rank_one_pole_example() {
        let t = gl2_data();
        let s = sphere();
        // αβᵗ/(z−3) with β = (0,1) plus a constant with α as eigenvector.
        let pole = pole_term(&g(3), 1, &vec![vec![g(0), g(1)], vec![g(0), g(0)]]);
        let good = matrix_add(&pole, &matrix_times(&RationalFunction::one(), &vec![vec![g(2), g(5)], vec![g(0), g(7)]]));
        assert!(is_lax_element(&good, &t, &s).is_valid());
        let bad = matrix_add(&pole, &matrix_times(&RationalFunction::one(), &vec![vec![g(2), g(5)], vec![g(1), g(7)]]));
        let r = is_lax_element(&bad, &t, &s);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].constraint, "L_{s,0}α = κα");
        // β with βᵗα ≠ 0 is detected.
        let traceful = pole_term(&g(3), 1, &vec![vec![g(1), g(0)], vec![g(0), g(0)]]);
        assert_eq!(is_lax_element(&traceful, &t, &s).violations[0].constraint, "βᵗα = 0");
        let stray = pole_term(&g(5), 1, &linalg::identity(2));
        assert_eq!(is_lax_element(&stray, &t, &s).violations[0].constraint, "poles in W ∪ A");
        let l = make_lax_element(
            &t,
            &LaxParams {
                points: vec![PointParams { beta: vec![g(0), g(1)], kappa: g(4), nu: g(0) }],
                tail: vec![],
                in_point_poles: vec![],
            },
            &s,
        )
        .unwrap();
        assert!(is_lax_element(&l, &t, &s).is_valid());
        assert!(is_zero_function_matrix(&matrix_commutator(&l, &l)));
    }

    #[test]
    fn zero_alpha_is_holomorphy() {
        let s = sphere();
        let t = gl2_data().with_zero_alpha();
        let f = matrix_times(&"1/z^2 + z".parse().unwrap(), &linalg::identity(2));
        assert!(is_lax_element(&f, &t, &s).is_valid());
        let p = pole_term(&g(3), 1, &linalg::identity(2));
        assert!(!is_lax_element(&p, &t, &s).is_valid());
    }

    #[test]
    fn validation_errors() {
        let s = sphere();
        let bad = TyurinData::new(
            LaxType::So(3),
            vec![TyurinPoint { gamma: g(2), alpha: vec![g(1), g(0), g(0)] }],
            None,
            &s,
        );
        assert!(matches!(bad, Err(LaxError::Tyurin(_))));
        let iso = isotropic_vector(&g(2), &Gr::gaussian(1, 1));
        assert!(linalg::dot(&iso, &iso).is_zero());
        let at_in_point = TyurinData::new(
            LaxType::Gl(2),
            vec![TyurinPoint { gamma: g(1), alpha: vec![g(1), g(0)] }],
            None,
            &s,
        );
        assert!(at_in_point.is_err());
        let t = gl2_data();
        let err = make_lax_element(
            &t,
            &LaxParams {
                points: vec![PointParams { beta: vec![g(1), g(1)], kappa: g(0), nu: g(0) }],
                tail: vec![],
                in_point_poles: vec![],
            },
            &s,
        );
        assert!(matches!(err, Err(LaxError::Constraint { .. })));
    }

    #[test]
    fn closure_small() {
        let s = sphere();
        for kind in [LaxType::Gl(2), LaxType::Sl(2), LaxType::So(3), LaxType::Sp(2)] {
            let rep = close_check(kind, &s, 11, 3).unwrap();
            assert!(rep.passed(), "{kind}: {:?}", rep.failures);
        }
    }

    #[test]
    fn gl_elements_form_an_associative_algebra() {
        let s = sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tyurin_data(LaxType::Gl(2), 2, &s, &mut rng).unwrap();
        for _ in 0..4 {
            let a = make_lax_element(&t, &random_params(&t, &s, &mut rng), &s).unwrap();
            let b = make_lax_element(&t, &random_params(&t, &s, &mut rng), &s).unwrap();
            let r = is_lax_element(&matrix_product(&a, &b), &t, &s);
            assert!(r.is_valid(), "{r}");
        }
    }

    #[test]
    fn same_point_rank_one_bracket() {
        let s = sphere();
        let t = gl2_data();
        let make = |beta: i64, kappa: i64, c: i64| {
            let p = LaxParams {
                points: vec![PointParams { beta: vec![g(0), g(beta)], kappa: g(kappa), nu: g(0) }],
                tail: vec![vec![vec![g(c), g(1)], vec![g(2), g(-c)]]],
                in_point_poles: vec![],
            };
            make_lax_element(&t, &p, &s).unwrap()
        };
        let (a, b) = (make(1, 2, 1), make(3, -1, 2));
        let br = lax_bracket(&a, &b, &t, &s).unwrap();
        let pt = ExtendedPoint::Finite(g(3));
        assert!(br.iter().flatten().filter_map(|f| f.order_at(&pt)).all(|o| o >= -1));
    }

    #[test]
    fn json_roundtrip() {
        let s = sphere();
        let t = TyurinData::from_json_str(
            r#"{"type":"gl2","points":[{"gamma":"3","alpha":["1","0"]}]}"#,
            &s,
        )
        .unwrap();
        assert_eq!(t, gl2_data());
        let m = matrix_from_json_str(r#"{"entries":[["0","1/(z-3)"],["0","0"]]}"#).unwrap();
        assert!(is_lax_element(&m, &t, &s).is_valid());
        let back = matrix_from_json_str(&matrix_to_json_value(&m).to_string()).unwrap();
        assert_eq!(back, m);
    }
}
