//! Small dense linear algebra over exact rationals, integers and f64.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Determinant by fraction-valued Gaussian elimination.
pub fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Solves `a x = b`; `None` when `a` is singular.
pub fn rational_solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        b.swap(p, col);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] *= &inv;
        }
        b[col] *= &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    Some(b)
}

/// Inverse by Gauss-Jordan with partial pivoting.
pub fn f64_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col].abs() < 1e-300 {
            return None;
        }
        a.swap(p, col);
        inv.swap(p, col);
        let d = a[col][col];
        for c in 0..n {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..n {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    Some(inv)
}

pub fn f64_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Row-style Hermite normal form of an integer matrix with `width` leading
/// columns; trailing columns ride along and record the transform.
///
/// Returns the nonzero rows (upper triangular in the leading block, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`).
pub fn hermite_rows(rows: Vec<Vec<BigInt>>, width: usize) -> Vec<Vec<BigInt>> {
    let (mut rows, r) = hermite_echelon(rows, width);
    rows.truncate(r);
    rows
}

/// Trailing columns of the rows whose leading block vanishes after
/// [`hermite_rows`]: a basis of the integer kernel of the leading block.
pub fn kernel_rows(rows: Vec<Vec<BigInt>>, width: usize) -> Vec<Vec<BigInt>> {
    let (rows, r) = hermite_echelon(rows, width);
    rows.into_iter().skip(r).map(|row| row[width..].to_vec()).collect()
}

fn hermite_echelon(mut rows: Vec<Vec<BigInt>>, width: usize) -> (Vec<Vec<BigInt>>, usize) {
    let mut r = 0;
    for col in 0..width {
        loop {
            let Some(p) = (r..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&x, &y| rows[x][col].abs().cmp(&rows[y][col].abs()))
            else {
                break;
            };
            rows.swap(p, r);
            let mut clean = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                let (head, tail) = rows.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= &q * y;
                }
                if !rows[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r >= rows.len() || rows[r][col].is_zero() {
            continue;
        }
        if rows[r][col].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = rows[i][col].div_floor(&rows[r][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(r);
            for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    (rows, r)
}

/// Converts `num/den` to the nearest-ish f64 without overflowing on huge operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let neg = num.is_negative() != den.is_negative();
    let (a, b) = (num.abs(), den.abs());
    let shift = 62 - (a.bits() as i64 - b.bits() as i64);
    let q = if shift >= 0 { (a << shift as usize) / b } else { a / (b << (-shift) as usize) };
    let v = q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    ratio_to_f64(x.numer(), x.denom())
}

fn gram_schmidt(vecs: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(vecs.len());
    let mut norms = Vec::with_capacity(vecs.len());
    for v in vecs {
        let mut w = v.clone();
        for (s, &nn) in star.iter().zip(&norms) {
            let m = dot(v, s) / nn;
            w.iter_mut().zip(s).for_each(|(x, y)| *x -= m * y);
        }
        norms.push(dot(&w, &w));
        star.push(w);
    }
    (star, norms)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL reduction (δ = 0.99) of integer rows whose real images are `vecs`.
/// The same unimodular moves are applied to both.
pub fn lll_reduce(rows: &mut [Vec<BigInt>], vecs: &mut [Vec<f64>]) {
    let n = rows.len();
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (star, norms) = gram_schmidt(vecs);
            let q = (dot(&vecs[k], &star[j]) / norms[j]).round();
            if q != 0.0 {
                let qb = BigInt::from(q as i64);
                let (head, tail) = rows.split_at_mut(k);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= &qb * y);
                let (head, tail) = vecs.split_at_mut(k);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= q * y);
            }
        }
        let (star, norms) = gram_schmidt(vecs);
        let m = dot(&vecs[k], &star[k - 1]) / norms[k - 1];
        if norms[k] >= (0.99 - m * m) * norms[k - 1] {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            vecs.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn det_and_solve() {
        let m = vec![vec![q(2), q(1)], vec![q(5), q(3)]];
        assert_eq!(rational_det(m.clone()), q(1));
        let x = rational_solve(m, vec![q(1), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(-1)]);
    }

    #[test]
    fn hnf_of_integer_gcd() {
        let rows = vec![vec![BigInt::from(12), 1.into(), 0.into()], vec![BigInt::from(18), 0.into(), 1.into()]];
        let h = hermite_rows(rows, 1);
        assert_eq!(h.len(), 1);
        assert_eq!(h[0][0], BigInt::from(6));
        assert_eq!(&h[0][1] * 12 + &h[0][2] * 18, BigInt::from(6));
    }

    #[test]
    fn ratio_conversion() {
        let big = BigInt::from(10).pow(400);
        assert!((ratio_to_f64(&(&big * 3), &(&big * 7)) - 3.0 / 7.0).abs() < 1e-16);
        assert_eq!(ratio_to_f64(&BigInt::from(-1), &BigInt::from(4)), -0.25);
    }
}
