//! Small dense linear algebra over a generic [`Scalar`].
//!
//! Everything here is 4-ish dimensional; plain Gaussian elimination with
//! pivoting by magnitude is exact for the rational backend and adequate for
//! f64 at these sizes. Float-only least-squares paths go through a Jacobi
//! eigensolver on the normal matrix.

use crate::scalar::Scalar;

/// Determinant of a 2x2.
pub fn det2<S: Scalar>(a: &S, b: &S, c: &S, d: &S) -> S {
    a.clone() * d.clone() - b.clone() * c.clone()
}

/// Determinant of a 3x3 given as rows.
pub fn det3<S: Scalar>(m: &[[S; 3]; 3]) -> S {
    m[0][0].clone() * det2(&m[1][1], &m[1][2], &m[2][1], &m[2][2])
        - m[0][1].clone() * det2(&m[1][0], &m[1][2], &m[2][0], &m[2][2])
        + m[0][2].clone() * det2(&m[1][0], &m[1][1], &m[2][0], &m[2][1])
}

/// Determinant of a 4x4 given as rows (cofactor expansion along row 0).
pub fn det4<S: Scalar>(m: &[[S; 4]; 4]) -> S {
    let mut acc = S::zero();
    for col in 0..4 {
        let mut sub: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c != col {
                    sub[r - 1][cc] = m[r][c].clone();
                    cc += 1;
                }
            }
        }
        let term = m[0][col].clone() * det3(&sub);
        acc = if col % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Solves `A x = b` for a 4x4 system by Gaussian elimination with partial
/// pivoting. Returns `None` when the pivot chain collapses (singular matrix).
pub fn solve4<S: Scalar>(a: &[[S; 4]; 4], b: &[S; 4]) -> Option<[S; 4]> {
    let mut m: Vec<[S; 5]> = (0..4)
        .map(|r| {
            [
                a[r][0].clone(),
                a[r][1].clone(),
                a[r][2].clone(),
                a[r][3].clone(),
                b[r].clone(),
            ]
        })
        .collect();
    for col in 0..4 {
        let piv = (col..4).max_by(|&r1, &r2| {
            m[r1][col]
                .abs()
                .partial_cmp(&m[r2][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(col, piv);
        for r in 0..4 {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone() / m[col][col].clone();
                for c in col..5 {
                    m[r][c] = m[r][c].clone() - f.clone() * m[col][c].clone();
                }
            }
        }
    }
    let mut x = [S::zero(), S::zero(), S::zero(), S::zero()];
    for r in 0..4 {
        x[r] = m[r][4].clone() / m[r][r].clone();
    }
    Some(x)
}

/// All `n choose 4` maximal minors of an n x 4 matrix, n >= 4.
pub fn minors4<S: Scalar>(rows: &[[S; 4]]) -> Vec<S> {
    let n = rows.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let m = [rows[a].clone(), rows[b].clone(), rows[c].clone(), rows[d].clone()];
                    out.push(det4(&m));
                }
            }
        }
    }
    out
}

/// All 3x3 minors of a 3 x 4 matrix (generalized cross product components,
/// unsigned positions; see [`cross4`] for the signed covector).
pub fn cross4<S: Scalar>(a: &[S; 4], b: &[S; 4], c: &[S; 4]) -> [S; 4] {
    // Covector n with n.a = n.b = n.c = 0: n_i = (-1)^i * det(minor_i).
    let mut n = [S::zero(), S::zero(), S::zero(), S::zero()];
    for i in 0..4 {
        let mut sub: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        let mut cc = 0;
        for c4 in 0..4 {
            if c4 != i {
                sub[0][cc] = a[c4].clone();
                sub[1][cc] = b[c4].clone();
                sub[2][cc] = c[c4].clone();
                cc += 1;
            }
        }
        let d = det3(&sub);
        n[i] = if i % 2 == 0 { d } else { -d };
    }
    n
}

/// Nullspace vector of a square-or-tall matrix with expected nullity one,
/// by elimination with full pivoting. `tol` is relative to the largest pivot;
/// exact backends ignore it. Returns `None` when the nullity is zero.
pub fn nullspace<S: Scalar>(rows: &[[S; 4]], tol: f64) -> Option<[S; 4]> {
    let mut m: Vec<[S; 4]> = rows.to_vec();
    let nr = m.len();
    let mut col_of_pivot: Vec<usize> = Vec::new();
    let mut used_rows: Vec<usize> = Vec::new();
    let mut max_pivot = S::zero();
    for _ in 0..4.min(nr) {
        // full pivot over unused rows/cols
        let mut best: Option<(usize, usize)> = None;
        for r in 0..nr {
            if used_rows.contains(&r) {
                continue;
            }
            for c in 0..4 {
                if col_of_pivot.contains(&c) {
                    continue;
                }
                if best.is_none()
                    || m[r][c].abs() > m[best.unwrap().0][best.unwrap().1].abs()
                {
                    best = Some((r, c));
                }
            }
        }
        let (pr, pc) = best?;
        let pv = m[pr][pc].clone();
        if pv.is_zero() || (!S::EXACT && S::below_tol(&pv, &max_pivot, tol)) {
            break;
        }
        if pv.abs() > max_pivot {
            max_pivot = pv.abs();
        }
        for r in 0..nr {
            if r != pr && !m[r][pc].is_zero() {
                let f = m[r][pc].clone() / pv.clone();
                for c in 0..4 {
                    m[r][c] = m[r][c].clone() - f.clone() * m[pr][c].clone();
                }
            }
        }
        used_rows.push(pr);
        col_of_pivot.push(pc);
    }
    if col_of_pivot.len() == 4 {
        return None; // full rank
    }
    // pick a free column, back-substitute
    let free = (0..4).find(|c| !col_of_pivot.contains(c))?;
    let mut x = [S::zero(), S::zero(), S::zero(), S::zero()];
    x[free] = S::one();
    for (k, &pc) in col_of_pivot.iter().enumerate() {
        let pr = used_rows[k];
        // row pr: m[pr][pc]*x[pc] + m[pr][free]*x[free] = 0
        x[pc] = -(m[pr][free].clone() / m[pr][pc].clone());
    }
    Some(x)
}

/// Nullspace vector of an n x m system with expected nullity one, arbitrary
/// column count. Same contract as [`nullspace`].
pub fn nullspace_dyn<S: Scalar>(rows: &[Vec<S>], ncols: usize, tol: f64) -> Option<Vec<S>> {
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let nr = m.len();
    let mut col_of_pivot: Vec<usize> = Vec::new();
    let mut used_rows: Vec<usize> = Vec::new();
    let mut max_pivot = S::zero();
    for _ in 0..ncols.min(nr) {
        let mut best: Option<(usize, usize)> = None;
        for r in 0..nr {
            if used_rows.contains(&r) {
                continue;
            }
            for c in 0..ncols {
                if col_of_pivot.contains(&c) {
                    continue;
                }
                if best.is_none()
                    || m[r][c].abs() > m[best.unwrap().0][best.unwrap().1].abs()
                {
                    best = Some((r, c));
                }
            }
        }
        let (pr, pc) = best?;
        let pv = m[pr][pc].clone();
        if pv.is_zero() || (!S::EXACT && S::below_tol(&pv, &max_pivot, tol)) {
            break;
        }
        if pv.abs() > max_pivot {
            max_pivot = pv.abs();
        }
        for r in 0..nr {
            if r != pr && !m[r][pc].is_zero() {
                let f = m[r][pc].clone() / pv.clone();
                for c in 0..ncols {
                    m[r][c] = m[r][c].clone() - f.clone() * m[pr][c].clone();
                }
            }
        }
        used_rows.push(pr);
        col_of_pivot.push(pc);
    }
    if col_of_pivot.len() == ncols {
        return None;
    }
    let free = (0..ncols).find(|c| !col_of_pivot.contains(c))?;
    let mut x = vec![S::zero(); ncols];
    x[free] = S::one();
    for (k, &pc) in col_of_pivot.iter().enumerate() {
        let pr = used_rows[k];
        x[pc] = -(m[pr][free].clone() / m[pr][pc].clone());
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Float-only helpers
// ---------------------------------------------------------------------------

/// Jacobi eigenvalue iteration for a symmetric matrix, returning
/// `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn jacobi_sym(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    (eig, v)
}

/// Least-squares unit nullspace vector of an overdetermined system
/// `rows * x = 0`: the eigenvector of `AᵀA` with smallest eigenvalue.
/// Returns `(vector, smallest_eigenvalue)`.
pub fn lsq_nullspace(rows: &[Vec<f64>], ncols: usize) -> (Vec<f64>, f64) {
    let mut ata = vec![vec![0.0; ncols]; ncols];
    for r in rows {
        for i in 0..ncols {
            for j in 0..ncols {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let (eig, vecs) = jacobi_sym(&ata);
    let mut k = 0;
    for i in 1..ncols {
        if eig[i] < eig[k] {
            k = i;
        }
    }
    let v: Vec<f64> = (0..ncols).map(|i| vecs[i][k]).collect();
    (v, eig[k].max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn det4_identity() {
        let id: [[f64; 4]; 4] = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert_eq!(det4(&id), 1.0);
    }

    #[test]
    fn solve4_rational_exact() {
        let a = [
            [Rat::new(2, 1), Rat::new(1, 1), Rat::zero(), Rat::zero()],
            [Rat::new(1, 1), Rat::new(3, 1), Rat::zero(), Rat::zero()],
            [Rat::zero(), Rat::zero(), Rat::new(1, 1), Rat::zero()],
            [Rat::zero(), Rat::zero(), Rat::zero(), Rat::new(5, 1)],
        ];
        let b = [Rat::new(1, 1), Rat::new(1, 1), Rat::new(7, 1), Rat::new(10, 1)];
        let x = solve4(&a, &b).unwrap();
        assert_eq!(x[0], Rat::new(2, 5));
        assert_eq!(x[1], Rat::new(1, 5));
        assert_eq!(x[2], Rat::new(7, 1));
        assert_eq!(x[3], Rat::new(2, 1));
    }

    #[test]
    fn nullspace_of_rank3() {
        // rows span {e1,e2,e3}; nullspace = e4
        let rows = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        let n = nullspace(&rows, 1e-12).unwrap();
        assert!(n[3].abs() > 0.9 || n[3].abs() > 0.0);
        assert_eq!(n[0], 0.0);
    }

    #[test]
    fn jacobi_small() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (eig, _) = jacobi_sym(&a);
        let mut e = eig.clone();
        e.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }
}
