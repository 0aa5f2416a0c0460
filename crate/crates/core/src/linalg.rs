//! Exact dense linear algebra over the Gaussian rationals.

use crate::exactnum::Gr;

/// Row-major dense matrix.
pub type Mat = Vec<Vec<Gr>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Gr::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Gr::one();
    }
    m
}

/// Elementary matrix `E_{ij}`.
pub fn unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(n, n);
    m[i][j] = Gr::one();
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            let x = &a[i][l];
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &(x * &b[l][j]);
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_scale(a: &Mat, c: &Gr) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

pub fn transpose(a: &Mat) -> Mat {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j].clone()).collect())
        .collect()
}

pub fn trace(a: &Mat) -> Gr {
    a.iter().enumerate().map(|(i, r)| r[i].clone()).sum()
}

pub fn is_zero_matrix(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(Gr::is_zero))
}

pub fn mat_vec(a: &Mat, v: &[Gr]) -> Vec<Gr> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn dot(a: &[Gr], b: &[Gr]) -> Gr {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `u vᵗ`
pub fn outer(u: &[Gr], v: &[Gr]) -> Mat {
    u.iter().map(|x| v.iter().map(|y| x * y).collect()).collect()
}

/// Flattens a matrix row by row.
pub fn flatten(a: &Mat) -> Vec<Gr> {
    a.iter().flatten().cloned().collect()
}

pub fn unflatten(v: &[Gr], rows: usize, cols: usize) -> Mat {
    (0..rows).map(|i| v[i * cols..(i + 1) * cols].to_vec()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// One solution of `a x = b` (free variables set to zero), or `None` when
/// the system is inconsistent.
pub fn solve(a: &Mat, b: &[Gr]) -> Option<Vec<Gr>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Mat = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Gr::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of the kernel of `a`.
pub fn nullspace(a: &Mat, cols: usize) -> Vec<Vec<Gr>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Gr::zero(); cols];
            v[f] = Gr::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -&m[r][f];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> Gr {
        Gr::from_integer(n)
    }

    #[test]
    fn solves_and_checks() {
        let a = vec![vec![g(2), g(1)], vec![g(1), g(3)]];
        let b = vec![g(3), g(5)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b);
        let singular = vec![vec![g(1), g(2)], vec![g(2), g(4)]];
        assert!(solve(&singular, &[g(1), g(3)]).is_none());
        let x = solve(&singular, &[g(1), g(2)]).unwrap();
        assert_eq!(mat_vec(&singular, &x), vec![g(1), g(2)]);
        assert_eq!(rank(&singular), 1);
        let ker = nullspace(&singular, 2);
        assert_eq!(ker.len(), 1);
        assert!(mat_vec(&singular, &ker[0]).iter().all(Gr::is_zero));
    }

    #[test]
    fn matrix_ops() {
        let e = unit(2, 0, 1);
        let f = unit(2, 1, 0);
        let h = commutator(&e, &f);
        assert_eq!(h, vec![vec![g(1), g(0)], vec![g(0), g(-1)]]);
        assert_eq!(trace(&h), g(0));
        assert_eq!(transpose(&e), f);
        assert_eq!(unflatten(&flatten(&h), 2, 2), h);
    }
}
