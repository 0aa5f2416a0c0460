//! Finite-dimensional Lie algebras given by structure constants, with an
//! invariant symmetric bilinear form. Matrix built-ins carry their defining
//! representation so that brackets can be checked against commutators.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::exactnum::Gr;
use crate::linalg::{self, Mat};

#[derive(Debug, Error)]
pub enum FiniteLieError {
    #[error("unknown Lie algebra {0:?} (expected sl<n>, gl<n>, so<n>, sp<2n>, abelian<d>)")]
    UnknownName(String),
    #[error("structure constants violate {0}")]
    Invalid(String),
    #[error("index {0} out of range for dimension {1}")]
    Index(usize, usize),
    #[error("malformed Lie algebra JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read Lie algebra file: {0}")]
    Io(#[from] std::io::Error),
}

/// `𝔤` with basis `x_0, …, x_{d-1}`, `[x_i, x_j] = Σ_k c[i][j][k] x_k`, and
/// bilinear form `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLieAlgebra {
    name: String,
    structure: Vec<Vec<Vec<Gr>>>,
    beta: Mat,
    labels: Vec<String>,
    matrices: Option<Vec<Mat>>,
}

impl FiniteLieAlgebra {
    /// Builds an algebra from structure constants and `β`, validating
    /// antisymmetry, Jacobi, symmetry and invariance of `β`.
    pub fn new(
        name: impl Into<String>,
        structure: Vec<Vec<Vec<Gr>>>,
        beta: Mat,
        labels: Vec<String>,
    ) -> Result<Self, FiniteLieError> {
        let alg = Self {
            name: name.into(),
            structure,
            beta,
            labels,
            matrices: None,
        };
        alg.validate()?;
        Ok(alg)
    }

    fn from_matrices(name: String, basis: Vec<Mat>, labels: Vec<String>) -> Self {
        let d = basis.len();
        let n = basis[0].len();
        // Columns of `coords` are the flattened basis matrices.
        let flat: Vec<Vec<Gr>> = basis.iter().map(linalg::flatten).collect();
        let coords: Mat = (0..n * n)
            .map(|r| flat.iter().map(|f| f[r].clone()).collect())
            .collect();
        let mut structure = vec![vec![vec![Gr::zero(); d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let c = linalg::commutator(&basis[i], &basis[j]);
                structure[i][j] =
                    linalg::solve(&coords, &linalg::flatten(&c)).expect("closed under commutator");
            }
        }
        let beta = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| linalg::trace(&linalg::mat_mul(&basis[i], &basis[j])))
                    .collect()
            })
            .collect();
        Self {
            name,
            structure,
            beta,
            labels,
            matrices: Some(basis),
        }
    }

    /// `sl(2)` with basis `e, f, h`: `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`.
    pub fn sl2() -> Self {
        let e = linalg::unit(2, 0, 1);
        let f = linalg::unit(2, 1, 0);
        let h = linalg::commutator(&e, &f);
        Self::from_matrices(
            "sl2".into(),
            vec![e, f, h],
            vec!["e".into(), "f".into(), "h".into()],
        )
    }

    /// `gl(n)` with basis `E_ij`.
    pub fn gl(n: usize) -> Self {
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in 0..n {
                basis.push(linalg::unit(n, i, j));
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
        Self::from_matrices(format!("gl{n}"), basis, labels)
    }

    /// `sl(n)` with basis `E_ij` (`i ≠ j`) and `E_ii - E_{i+1,i+1}`.
    pub fn sl(n: usize) -> Self {
        if n == 2 {
            return Self::sl2();
        }
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    basis.push(linalg::unit(n, i, j));
                    labels.push(format!("E{}{}", i + 1, j + 1));
                }
            }
        }
        for i in 0..n - 1 {
            basis.push(linalg::mat_sub(&linalg::unit(n, i, i), &linalg::unit(n, i + 1, i + 1)));
            labels.push(format!("H{}", i + 1));
        }
        Self::from_matrices(format!("sl{n}"), basis, labels)
    }

    /// `so(n)` with basis `E_ij - E_ji`, `i < j`.
    pub fn so(n: usize) -> Self {
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                basis.push(linalg::mat_sub(&linalg::unit(n, i, j), &linalg::unit(n, j, i)));
                labels.push(format!("A{}{}", i + 1, j + 1));
            }
        }
        Self::from_matrices(format!("so{n}"), basis, labels)
    }

    /// The standard symplectic form `[[0, I], [-I, 0]]` of size `2n`.
    pub fn symplectic_form(n: usize) -> Mat {
        let mut j = linalg::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[i][n + i] = Gr::one();
            j[n + i][i] = -Gr::one();
        }
        j
    }

    /// `sp(2n) = {X : Xᵗ J + J X = 0}` with block basis.
    pub fn sp(n: usize) -> Self {
        let m = 2 * n;
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in 0..n {
                basis.push(linalg::mat_sub(
                    &linalg::unit(m, i, j),
                    &linalg::unit(m, n + j, n + i),
                ));
                labels.push(format!("A{}{}", i + 1, j + 1));
            }
        }
        for (tag, off_r, off_c) in [("B", 0, n), ("C", n, 0)] {
            for i in 0..n {
                for j in i..n {
                    let mut x = linalg::unit(m, off_r + i, off_c + j);
                    if i != j {
                        x = linalg::mat_add(&x, &linalg::unit(m, off_r + j, off_c + i));
                    }
                    basis.push(x);
                    labels.push(format!("{tag}{}{}", i + 1, j + 1));
                }
            }
        }
        Self::from_matrices(format!("sp{m}"), basis, labels)
    }

    /// Abelian `ℂ^d`; `β` is the identity form (any symmetric form is
    /// invariant for an abelian algebra).
    pub fn abelian(d: usize) -> Self {
        Self {
            name: format!("abelian{d}"),
            structure: vec![vec![vec![Gr::zero(); d]; d]; d],
            beta: linalg::identity(d),
            labels: (0..d).map(|i| format!("x{}", i + 1)).collect(),
            matrices: None,
        }
    }

    /// Built-in by name: `sl<n>`, `gl<n>`, `so<n>`, `sp<2n>`, `abelian<d>`.
    pub fn by_name(name: &str) -> Result<Self, FiniteLieError> {
        let bad = || FiniteLieError::UnknownName(name.to_string());
        let num = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)?.trim_start_matches(['(', '_']).trim_end_matches(')').parse().ok()
        };
        match name {
            "sl2" | "sl(2)" => return Ok(Self::sl2()),
            _ => {}
        }
        if let Some(n) = num("sl").filter(|&n| n >= 2) {
            return Ok(Self::sl(n));
        }
        if let Some(n) = num("gl").filter(|&n| n >= 1) {
            return Ok(Self::gl(n));
        }
        if let Some(n) = num("so").filter(|&n| n >= 2) {
            return Ok(Self::so(n));
        }
        if let Some(n) = num("sp").filter(|&n| n >= 2 && n % 2 == 0) {
            return Ok(Self::sp(n / 2));
        }
        if let Some(d) = num("abelian").filter(|&d| d >= 1) {
            return Ok(Self::abelian(d));
        }
        Err(bad())
    }

    /// Ingests `{"name": …, "dimension": d, "brackets": [{"i":0,"j":1,
    /// "terms":{"2":"1"}}], "beta": [["1","0"],…]}`. Brackets with `i > j`
    /// may be omitted; they are filled in by antisymmetry.
    pub fn from_json_str(s: &str) -> Result<Self, FiniteLieError> {
        #[derive(Deserialize)]
        struct Bracket {
            i: usize,
            j: usize,
            terms: BTreeMap<usize, Gr>,
        }
        #[derive(Deserialize)]
        struct File {
            #[serde(default)]
            name: Option<String>,
            dimension: usize,
            #[serde(default)]
            brackets: Vec<Bracket>,
            beta: Vec<Vec<Gr>>,
            #[serde(default)]
            labels: Option<Vec<String>>,
        }
        let f: File = serde_json::from_str(s)?;
        let d = f.dimension;
        let mut c = vec![vec![vec![Gr::zero(); d]; d]; d];
        let mut seen = vec![vec![false; d]; d];
        for b in &f.brackets {
            for &x in [b.i, b.j].iter().chain(b.terms.keys()) {
                if x >= d {
                    return Err(FiniteLieError::Index(x, d));
                }
            }
            let mut v = vec![Gr::zero(); d];
            for (k, val) in &b.terms {
                v[*k] = val.clone();
            }
            if seen[b.i][b.j] && c[b.i][b.j] != v {
                return Err(FiniteLieError::Invalid(format!(
                    "antisymmetry: conflicting entries for [x{}, x{}]",
                    b.i, b.j
                )));
            }
            c[b.i][b.j] = v.clone();
            seen[b.i][b.j] = true;
            if !seen[b.j][b.i] {
                c[b.j][b.i] = v.iter().map(|x| -x).collect();
            }
        }
        if f.beta.len() != d || f.beta.iter().any(|r| r.len() != d) {
            return Err(FiniteLieError::Invalid(format!("β must be a {d}×{d} matrix")));
        }
        let labels = f
            .labels
            .unwrap_or_else(|| (0..d).map(|i| format!("x{}", i + 1)).collect());
        Self::new(f.name.unwrap_or_else(|| "custom".into()), c, f.beta, labels)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, FiniteLieError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.structure.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Coefficients of `[x_i, x_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Gr] {
        &self.structure[i][j]
    }

    pub fn beta(&self, i: usize, j: usize) -> &Gr {
        &self.beta[i][j]
    }

    pub fn beta_matrix(&self) -> &Mat {
        &self.beta
    }

    pub fn matrices(&self) -> Option<&[Mat]> {
        self.matrices.as_deref()
    }

    /// Bracket of coordinate vectors.
    pub fn bracket(&self, x: &[Gr], y: &[Gr]) -> Vec<Gr> {
        let d = self.dim();
        let mut out = vec![Gr::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (k, s) in self.structure[i][j].iter().enumerate() {
                    if !s.is_zero() {
                        out[k] += &(&c * s);
                    }
                }
            }
        }
        out
    }

    pub fn beta_form(&self, x: &[Gr], y: &[Gr]) -> Gr {
        linalg::dot(x, &linalg::mat_vec(&self.beta, y))
    }

    fn unit_vector(&self, i: usize) -> Vec<Gr> {
        let mut v = vec![Gr::zero(); self.dim()];
        v[i] = Gr::one();
        v
    }

    /// Checks antisymmetry, Jacobi, and symmetry and invariance of `β` on
    /// all basis triples.
    pub fn validate(&self) -> Result<(), FiniteLieError> {
        let d = self.dim();
        let bad = |m: String| Err(FiniteLieError::Invalid(m));
        if self.structure.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return bad("shape".into());
        }
        for i in 0..d {
            for j in 0..d {
                let sum: Vec<Gr> = self.structure[i][j]
                    .iter()
                    .zip(&self.structure[j][i])
                    .map(|(a, b)| a + b)
                    .collect();
                if sum.iter().any(|x| !x.is_zero()) {
                    return bad(format!("antisymmetry at ({i},{j})"));
                }
                if self.beta[i][j] != self.beta[j][i] {
                    return bad(format!("symmetry of β at ({i},{j})"));
                }
            }
        }
        let e: Vec<Vec<Gr>> = (0..d).map(|i| self.unit_vector(i)).collect();
        for i in 0..d {
            for j in 0..d {
                let xy = self.bracket(&e[i], &e[j]);
                for k in 0..d {
                    let yz = self.bracket(&e[j], &e[k]);
                    let zx = self.bracket(&e[k], &e[i]);
                    let jac: Vec<Gr> = self
                        .bracket(&xy, &e[k])
                        .iter()
                        .zip(self.bracket(&yz, &e[i]))
                        .zip(self.bracket(&zx, &e[j]))
                        .map(|((a, b), c)| a + &b + c)
                        .collect();
                    if jac.iter().any(|x| !x.is_zero()) {
                        return bad(format!("Jacobi identity at ({i},{j},{k})"));
                    }
                    if self.beta_form(&xy, &e[k]) != self.beta_form(&e[i], &yz) {
                        return bad(format!("invariance of β at ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> Gr {
        Gr::from_integer(n)
    }

    #[test]
    fn builtins_validate() {
        for alg in [
            FiniteLieAlgebra::sl2(),
            FiniteLieAlgebra::gl(2),
            FiniteLieAlgebra::sl(3),
            FiniteLieAlgebra::gl(3),
            FiniteLieAlgebra::so(3),
            FiniteLieAlgebra::so(4),
            FiniteLieAlgebra::sp(1),
            FiniteLieAlgebra::sp(2),
            FiniteLieAlgebra::abelian(3),
        ] {
            alg.validate().unwrap();
        }
        assert_eq!(FiniteLieAlgebra::sp(2).dim(), 10);
        assert_eq!(FiniteLieAlgebra::so(3).dim(), 3);
        assert_eq!(FiniteLieAlgebra::by_name("sp4").unwrap().dim(), 10);
        assert!(FiniteLieAlgebra::by_name("e8").is_err());
    }

    #[test]
    fn sl2_relations() {
        let s = FiniteLieAlgebra::sl2();
        assert_eq!(s.bracket_basis(0, 1), &[g(0), g(0), g(1)]);
        assert_eq!(s.bracket_basis(2, 0), &[g(2), g(0), g(0)]);
        assert_eq!(s.bracket_basis(2, 1), &[g(0), g(-2), g(0)]);
        assert_eq!(s.beta(0, 1), &g(1));
        assert_eq!(s.beta(2, 2), &g(2));
        assert_eq!(s.beta(0, 0), &g(0));
    }

    #[test]
    fn json_ingest() {
        let src = r#"{"name": "sl2", "dimension": 3,
            "brackets": [{"i":0,"j":1,"terms":{"2":"1"}},
                         {"i":2,"j":0,"terms":{"0":"2"}},
                         {"i":2,"j":1,"terms":{"1":"-2"}}],
            "beta": [["0","1","0"],["1","0","0"],["0","0","2"]]}"#;
        let a = FiniteLieAlgebra::from_json_str(src).unwrap();
        let s = FiniteLieAlgebra::sl2();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.bracket_basis(i, j), s.bracket_basis(i, j));
            }
        }
        let broken = r#"{"dimension": 3,
            "brackets": [{"i":0,"j":1,"terms":{"2":"1"}}, {"i":2,"j":0,"terms":{"0":"1"}}],
            "beta": [["0","0","0"],["0","0","0"],["0","0","0"]]}"#;
        assert!(FiniteLieAlgebra::from_json_str(broken).is_err());
        assert!(FiniteLieAlgebra::from_json_str("[").is_err());
    }
}
