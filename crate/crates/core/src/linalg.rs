//! Small dense helpers: vector arithmetic, determinants of stacked rows,
//! random rotations.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Largest matrix size handled on the stack by [`det_rows`].
pub const MAX_DIM: usize = 16;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Determinant of an `n x n` row-major matrix, destroying `a`.
///
/// LU factorization with partial pivoting; sizes 1 through 4 use closed forms.
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    match n {
        0 => return 1.0,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        3 => {
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        4 => return det4(a),
        _ => {}
    }
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f != 0.0 {
                for j in col + 1..n {
                    a[row * n + j] -= f * a[col * n + j];
                }
            }
        }
    }
    det
}

fn det4(m: &[f64]) -> f64 {
    let s0 = m[0] * m[5] - m[4] * m[1];
    let s1 = m[0] * m[6] - m[4] * m[2];
    let s2 = m[0] * m[7] - m[4] * m[3];
    let s3 = m[1] * m[6] - m[5] * m[2];
    let s4 = m[1] * m[7] - m[5] * m[3];
    let s5 = m[2] * m[7] - m[6] * m[3];
    let c5 = m[10] * m[15] - m[14] * m[11];
    let c4 = m[9] * m[15] - m[13] * m[11];
    let c3 = m[9] * m[14] - m[13] * m[10];
    let c2 = m[8] * m[15] - m[12] * m[11];
    let c1 = m[8] * m[14] - m[12] * m[10];
    let c0 = m[8] * m[13] - m[12] * m[9];
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Determinant of the square matrix whose rows are yielded by `rows`.
///
/// Returns `None` when the row count or a row length differs from `n`, or
/// `n > MAX_DIM`.
pub fn det_rows<'a, I>(n: usize, rows: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    if n > MAX_DIM {
        return None;
    }
    let mut buf = [0.0f64; MAX_DIM * MAX_DIM];
    let mut count = 0;
    for row in rows {
        if row.len() != n || count >= n {
            return None;
        }
        buf[count * n..(count + 1) * n].copy_from_slice(row);
        count += 1;
    }
    if count != n {
        return None;
    }
    Some(det_in_place(&mut buf[..n * n], n))
}

/// Smallest and largest singular value of the matrix whose rows are `rows`.
pub fn singular_range(rows: &[Vec<f64>]) -> (f64, f64) {
    if rows.is_empty() {
        return (f64::INFINITY, 0.0);
    }
    if rows.len() == 1 {
        let n = norm(&rows[0]);
        return (n, n);
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let sv = m.singular_values();
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    (lo, hi)
}

/// Haar-random element of SO(n), returned as rows.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    (0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect()
}

/// `m · v` for a row-major square matrix.
pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Pairwise (tree) summation; the tree shape depends only on `values.len()`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
